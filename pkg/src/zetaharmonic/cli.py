"""Command-line front end: build/verify zero tables, compute harmonic-sum
estimates, reproduce the fixed-12-digit convergence table, and expose the
package constants.

Every invocation assembles one internal record and renders it either as
human-readable text or as a single JSON document (``--format structured``)
whose numeric fields are decimal strings, so a round-trip parse loses
nothing.  Exit codes: 0 success, 1 verification failure, 2 certification
failure, 3 usage or domain error.
"""

import argparse
import json
import math
import random
import sys
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from gmpy2 import mpfr

from .enclosure import (
    CONSTANTS,
    Enclosure,
    context,
    enc_const,
    mpfr_to_decimal,
)
from .errors import (
    AmbiguityError,
    CertificationError,
    DomainError,
    InsufficientPrecisionError,
    RefinementError,
    TableFormatError,
)
from .estimator import (
    H_REFERENCE,
    H_REFERENCE_RADIUS,
    accelerated_estimate,
    buthe_check,
    format_fixed12,
    hassani_shift,
    naive_estimate,
    shift_constant,
)
from .zeros.pipeline import build_zero_table
from .zeros.search import zero_sign_at
from .zeros.table import ZeroTable, load_zero_table, save_zero_table

SCHEMA_VERSION = "1"
_SIGNS_SEED = 8151       # fixed: verify must be reproducible
_SIGNS_SAMPLE = 8
_ENVELOPE_BASE = 10      # envelope checks run at n = 10, 100, ...
_DECAY_MIN_DECADES = 3   # a slope fit needs at least three points


@dataclass(frozen=True)
class RunConfig:
    subcommand: str
    count: Optional[int] = None
    height: Optional[float] = None
    zeros_path: Optional[str] = None
    method: str = "accelerated"
    shift: Optional[str] = None
    rows: Optional[str] = None
    name: Optional[str] = None
    precision_bits: int = 192
    fmt: str = "text"
    out: Optional[str] = None
    allow_uncertified: bool = False


# ----------------------------------------------------------------------
# rendering
# ----------------------------------------------------------------------

def _dec(x: mpfr, sig: int = 40) -> str:
    return str(mpfr_to_decimal(x, sig))


def _enc_record(enc: Enclosure, sig: int = 40) -> Dict[str, str]:
    return {"midpoint": _dec(enc.midpoint, sig),
            "radius": repr(float(enc.radius))}


def _estimate_record(est, shift: Optional[str]) -> Dict[str, object]:
    return {
        "method": est.method,
        "shift": shift or "none",
        "n_zeros": est.n_zeros,
        "fast": est.fast,
        "t": _enc_record(est.T),
        "value": _enc_record(est.value),
        "value_fixed12": format_fixed12(est.value.midpoint),
        "tail_bound": repr(est.tail_bound),
        "total": _enc_record(est.total),
    }


def _text_zeros(rec: Dict[str, object]) -> str:
    lines = [f"wrote {rec['count']} ordinates to {rec['path']}"]
    if rec["certified"]:
        lines.append(f"certified height: {rec['certified_height']} "
                     f"({rec['method']})")
    else:
        lines.append("WARNING: certification failed; table flagged "
                     "uncertified")
        if rec.get("failure"):
            lines.append(f"  reason: {rec['failure']}")
    lines.append(f"max radius: {rec['max_radius']}")
    return "\n".join(lines)


def _text_estimate(rec: Dict[str, object]) -> str:
    val = rec["value"]
    tot = rec["total"]
    lines = [
        f"method: {rec['method']}"
        + (f" (shift: {rec['shift']})" if rec["shift"] != "none" else ""),
        f"zeros used: {rec['n_zeros']}",
        f"T: {rec['t']['midpoint']}",
        f"value: {val['midpoint']} ± {val['radius']}",
        f"value (12 dp): {rec['value_fixed12']}",
        f"tail bound: {rec['tail_bound']}",
        f"total: {tot['midpoint']} ± {tot['radius']}",
    ]
    return "\n".join(lines)


def _text_table(rec: Dict[str, object]) -> str:
    lines = [f"{'n':>8}  estimate"]
    for row in rec["rows"]:
        lines.append(f"{row['n']:>8}  {row['estimate']}")
    return "\n".join(lines)


def _text_verify(rec: Dict[str, object]) -> str:
    lines = []
    if rec.get("warning"):
        lines.append(f"warning: {rec['warning']}")
    for chk in rec["checks"]:
        lines.append(f"{chk['name']}: {chk['status']} ({chk['detail']})")
    lines.append(f"result: {'PASS' if rec['passed'] else 'FAIL'}")
    return "\n".join(lines)


def _text_constant(rec: Dict[str, object]) -> str:
    lines = []
    for name, val in rec["values"].items():
        lines.append(f"{name} = {val['midpoint']} ± {val['radius']}")
    return "\n".join(lines)


_TEXT_RENDERERS = {
    "zeros": _text_zeros,
    "estimate": _text_estimate,
    "table": _text_table,
    "verify": _text_verify,
    "constant": _text_constant,
}


def _emit(rec: Dict[str, object], cfg: RunConfig) -> None:
    if cfg.fmt == "structured":
        payload = json.dumps(rec, indent=2) + "\n"
    else:
        payload = _TEXT_RENDERERS[cfg.subcommand](rec) + "\n"
    if cfg.out and cfg.subcommand != "zeros":
        with open(cfg.out, "w") as f:
            f.write(payload)
    else:
        sys.stdout.write(payload)


# ----------------------------------------------------------------------
# shared plumbing
# ----------------------------------------------------------------------

def _load_table(cfg: RunConfig) -> ZeroTable:
    if not cfg.zeros_path:
        raise DomainError("a zero-table path is required (--zeros)")
    return load_zero_table(cfg.zeros_path)


def _require_certified(table: ZeroTable, cfg: RunConfig) -> None:
    if not table.is_rigorous and not cfg.allow_uncertified:
        raise CertificationError(
            "zero table is not certified by the window test; pass "
            "--allow-uncertified to proceed on trust")


def _estimator_for(method: str):
    return naive_estimate if method == "naive" else accelerated_estimate


# ----------------------------------------------------------------------
# subcommands
# ----------------------------------------------------------------------

def cmd_zeros(cfg: RunConfig) -> Tuple[Dict[str, object], int]:
    if not cfg.out:
        raise DomainError("an output path is required (--out)")
    table = build_zero_table(count=cfg.count, height=cfg.height,
                             precision_bits=cfg.precision_bits,
                             keep_uncertified=True)
    save_zero_table(cfg.out, table)
    certified = table.certificate is not None
    max_rad = max((float(z.gamma.radius) for z in table.zeros), default=0.0)
    rec: Dict[str, object] = {
        "schema_version": SCHEMA_VERSION,
        "command": "zeros",
        "count": len(table),
        "path": cfg.out,
        "certified": certified,
        "method": table.certificate.method if certified else "uncertified",
        "certified_height": (_dec(table.certificate.height.midpoint, 30)
                             if certified else None),
        "max_radius": repr(max_rad),
        "failure": table.source.get("certification_failure"),
    }
    return rec, 0 if certified else 2


def cmd_estimate(cfg: RunConfig) -> Tuple[Dict[str, object], int]:
    table = _load_table(cfg)
    _require_certified(table, cfg)
    count = cfg.count
    height = cfg.height
    if count is None and height is None:
        count = len(table)  # default: use the whole table
    est = _estimator_for(cfg.method)(
        table, height, count=count, precision_bits=cfg.precision_bits,
        allow_uncertified=cfg.allow_uncertified)
    if cfg.shift == "hassani":
        est = hassani_shift(est)
    rec: Dict[str, object] = {
        "schema_version": SCHEMA_VERSION,
        "command": "estimate",
        **_estimate_record(est, cfg.shift),
    }
    return rec, 0


def _parse_rows(rows: Optional[str]) -> List[int]:
    items = [s.strip() for s in (rows or "").split(",") if s.strip()]
    if not items:
        raise DomainError("at least one row is required (--rows n1,n2,...)")
    out = []
    for s in items:
        try:
            n = int(s)
        except ValueError:
            raise DomainError(f"row {s!r} is not an integer")
        if n < 1:
            raise DomainError(f"row {n} must be positive")
        out.append(n)
    return out


def cmd_table(cfg: RunConfig) -> Tuple[Dict[str, object], int]:
    table = _load_table(cfg)
    _require_certified(table, cfg)
    rows = _parse_rows(cfg.rows)
    short = [n for n in rows if n > len(table)]
    if short:
        raise DomainError(
            f"table holds only {len(table)} zeros; rows {short} are beyond "
            f"it (shortfall {max(short) - len(table)})")
    out_rows = []
    for n in rows:
        est = accelerated_estimate(table, count=n,
                                   precision_bits=cfg.precision_bits,
                                   allow_uncertified=cfg.allow_uncertified)
        out_rows.append({
            "n": n,
            "estimate": format_fixed12(est.value.midpoint),
            "value": _enc_record(est.value),
            "tail_bound": repr(est.tail_bound),
        })
    rec: Dict[str, object] = {
        "schema_version": SCHEMA_VERSION,
        "command": "table",
        "rows": out_rows,
    }
    return rec, 0


# ---- verify checks ---------------------------------------------------

def _check_certificate(table: ZeroTable) -> Dict[str, str]:
    if table.is_rigorous:
        ok = table.certificate.recheck()
        return {"name": "certificate",
                "status": "pass" if ok else "fail",
                "detail": "window-test evidence rechecked" if ok
                else "stored window-test evidence fails its inequality"}
    return {"name": "certificate", "status": "skipped",
            "detail": "no window-test certificate; completeness is trusted"}


def _check_ordinate_signs(table: ZeroTable) -> Dict[str, str]:
    zs = table.zeros
    if not zs:
        return {"name": "ordinate-signs", "status": "skipped",
                "detail": "empty table"}
    idx = {0, len(zs) - 1}
    idx.update(random.Random(_SIGNS_SEED).sample(
        range(len(zs)), min(_SIGNS_SAMPLE, len(zs))))
    for k in sorted(idx):
        z = zs[k]
        p = z.gamma.precision_bits
        ctx = context(p)
        lo = ctx.sub(z.gamma.midpoint, z.gamma.radius)
        hi = ctx.add(z.gamma.midpoint, z.gamma.radius)
        sl = zero_sign_at(lo, p)
        sh = zero_sign_at(hi, p)
        if sl == 0 or sh == 0 or sl == sh:
            return {"name": "ordinate-signs", "status": "fail",
                    "detail": f"ordinate {z.index} has no sign change "
                              f"across its enclosure"}
    return {"name": "ordinate-signs", "status": "pass",
            "detail": f"{len(idx)} ordinates sign-checked"}


def _check_buthe(table: ZeroTable, p: int) -> Dict[str, str]:
    four_pi_e = 2.0 * float(enc_const("two_pi_e", 96).midpoint)
    if table.certificate is not None:
        top = float(table.certificate.height.midpoint)
    elif table.zeros:
        top = float(table.zeros[-1].gamma.midpoint)
    else:
        top = 0.0
    top *= 0.999
    if top <= four_pi_e * 1.01:
        return {"name": "buthe-inequality", "status": "skipped",
                "detail": "table too short to sample above 4*pi*e"}
    heights = {four_pi_e}
    if 5000.0 < top:
        heights.add(5000.0)
    lo, hi = math.log(four_pi_e * 1.05), math.log(top)
    for k in range(6):
        heights.add(math.exp(lo + (hi - lo) * k / 5.0))
    sample = sorted(heights)
    rows = buthe_check(table, sample, precision_bits=p,
                       allow_uncertified=True)
    bad = [r for r in rows if r["status"] != "pass"]
    if bad:
        return {"name": "buthe-inequality", "status": "fail",
                "detail": f"height {bad[0]['height']}: {bad[0]['status']}"}
    return {"name": "buthe-inequality", "status": "pass",
            "detail": f"{len(rows)} heights"}


def _envelope_grid(n_zeros: int) -> List[int]:
    grid = []
    n = _ENVELOPE_BASE
    while n <= n_zeros:
        grid.append(n)
        n *= 10
    return grid


def _check_envelope(table: ZeroTable, p: int) -> Dict[str, str]:
    grid = _envelope_grid(len(table))
    if not grid:
        return {"name": "reference-envelope", "status": "skipped",
                "detail": "table smaller than the first decade"}
    ref = Fraction(Decimal(H_REFERENCE))
    eps = Fraction(Decimal(repr(H_REFERENCE_RADIUS)))
    for n in grid:
        est = accelerated_estimate(table, count=n, precision_bits=p,
                                   allow_uncertified=True)
        if not (est.total.lower_q() <= ref - eps
                and ref + eps <= est.total.upper_q()):
            return {"name": "reference-envelope", "status": "fail",
                    "detail": f"n={n}: envelope misses the reference value"}
    return {"name": "reference-envelope", "status": "pass",
            "detail": "n = " + ", ".join(str(n) for n in grid)}


def _slope(xs: List[float], ys: List[float]) -> float:
    mx = sum(xs) / len(xs)
    my = sum(ys) / len(ys)
    num = sum((x - mx) * (y - my) for x, y in zip(xs, ys))
    den = sum((x - mx) ** 2 for x in xs)
    return num / den


def _check_decay(table: ZeroTable, p: int) -> Dict[str, str]:
    grid = _envelope_grid(len(table))
    if len(grid) < _DECAY_MIN_DECADES:
        return {"name": "decay-slopes", "status": "skipped",
                "detail": f"need {_DECAY_MIN_DECADES} decades of zeros"}
    ref = float(Decimal(H_REFERENCE))
    log_t, err_acc, err_nai = [], [], []
    for n in grid:
        acc = accelerated_estimate(table, count=n, precision_bits=p,
                                   allow_uncertified=True)
        nai = naive_estimate(table, count=n, precision_bits=p,
                             allow_uncertified=True)
        log_t.append(math.log10(float(acc.T.midpoint)))
        err_acc.append(math.log10(abs(float(acc.value.midpoint) - ref)))
        err_nai.append(math.log10(abs(float(nai.value.midpoint) - ref)))
    s_acc = _slope(log_t, err_acc)
    s_nai = _slope(log_t, err_nai)
    detail = f"accelerated {s_acc:+.2f}, naive {s_nai:+.2f}"
    if s_acc > -1.8:
        return {"name": "decay-slopes", "status": "fail",
                "detail": detail + " (accelerated too shallow)"}
    if not -1.3 <= s_nai <= -0.7:
        return {"name": "decay-slopes", "status": "fail",
                "detail": detail + " (naive outside [-1.3, -0.7])"}
    return {"name": "decay-slopes", "status": "pass", "detail": detail}


def cmd_verify(cfg: RunConfig) -> Tuple[Dict[str, object], int]:
    table = _load_table(cfg)
    p = cfg.precision_bits
    checks = [
        _check_certificate(table),
        _check_ordinate_signs(table),
        _check_buthe(table, p),
        _check_envelope(table, p),
        _check_decay(table, p),
    ]
    passed = all(c["status"] != "fail" for c in checks)
    rec: Dict[str, object] = {
        "schema_version": SCHEMA_VERSION,
        "command": "verify",
        "path": cfg.zeros_path,
        "checks": checks,
        "passed": passed,
    }
    if not table.is_rigorous:
        rec["warning"] = ("table is not certified by the window test; "
                          "completeness is trusted, not proved")
    return rec, 0 if passed else 1


def cmd_constant(cfg: RunConfig) -> Tuple[Dict[str, object], int]:
    p = cfg.precision_bits
    names = list(CONSTANTS) + ["hassani_shift"]
    if cfg.name is not None:
        if cfg.name not in names:
            raise DomainError(
                f"unknown constant {cfg.name!r}; valid: {', '.join(names)}")
        names = [cfg.name]
    values = {}
    for name in names:
        enc = shift_constant(p) if name == "hassani_shift" \
            else enc_const(name, p)
        values[name] = _enc_record(enc, 50)
    rec: Dict[str, object] = {
        "schema_version": SCHEMA_VERSION,
        "command": "constant",
        "precision_bits": p,
        "values": values,
    }
    return rec, 0


_COMMANDS = {
    "zeros": cmd_zeros,
    "estimate": cmd_estimate,
    "table": cmd_table,
    "verify": cmd_verify,
    "constant": cmd_constant,
}


# ----------------------------------------------------------------------
# argument parsing
# ----------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; the package contract says 3."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(3)


def _add_common(sub, target: bool = False):
    sub.add_argument("--precision-bits", type=int, default=192,
                     dest="precision_bits")
    sub.add_argument("--format", choices=("text", "structured"),
                     default="text", dest="fmt")
    sub.add_argument("--out", default=None)
    if target:
        grp = sub.add_mutually_exclusive_group()
        grp.add_argument("--count", type=int, default=None)
        grp.add_argument("--height", type=float, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="zetaharmonic",
                     description="harmonic sum over zeta zero ordinates: "
                                 "certified tables and estimates")
    subs = parser.add_subparsers(dest="subcommand", required=True)

    s = subs.add_parser("zeros", help="compute, certify, and save a table")
    grp = s.add_mutually_exclusive_group(required=True)
    grp.add_argument("--count", type=int, default=None)
    grp.add_argument("--height", type=float, default=None)
    _add_common(s)

    s = subs.add_parser("estimate", help="harmonic-sum estimate from a table")
    s.add_argument("--zeros", required=True, dest="zeros_path")
    s.add_argument("--method", choices=("naive", "accelerated"),
                   default="accelerated")
    s.add_argument("--shift", choices=("hassani",), default=None)
    s.add_argument("--allow-uncertified", action="store_true",
                   dest="allow_uncertified")
    _add_common(s, target=True)

    s = subs.add_parser("table", help="fixed-12-digit convergence table")
    s.add_argument("--zeros", required=True, dest="zeros_path")
    s.add_argument("--rows", required=True,
                   help="comma-separated zero counts, e.g. 10,100,1000")
    s.add_argument("--allow-uncertified", action="store_true",
                   dest="allow_uncertified")
    _add_common(s)

    s = subs.add_parser("verify", help="invariant suite over a table")
    s.add_argument("--zeros", required=True, dest="zeros_path")
    _add_common(s)

    s = subs.add_parser("constant", help="print package constants")
    s.add_argument("name", nargs="?", default=None)
    _add_common(s)

    return parser


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    fields = {f: getattr(args, f) for f in RunConfig.__dataclass_fields__
              if hasattr(args, f)}
    return RunConfig(**fields)


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code
        return 0 if code in (0, None) else 3
    cfg = _config_from_args(args)
    try:
        rec, status = _COMMANDS[cfg.subcommand](cfg)
    except (DomainError, AmbiguityError, TableFormatError,
            InsufficientPrecisionError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (CertificationError, RefinementError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    _emit(rec, cfg)
    return status


if __name__ == "__main__":
    sys.exit(main())
