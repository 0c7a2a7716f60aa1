"""Zero-ordinate tables: domain types, completeness certificates, and a
durable text format.

A table is an ordered, contiguously indexed list of ordinate enclosures plus
an optional completeness certificate.  The certificate carries the window
evidence of the counting-integral comparison that established completeness,
stored as decimal strings so the inequality can be re-checked from the file
alone, long after the session that produced it.

File format (UTF-8 text):

    # zero-table v1
    # count=3
    # precision_bits=96
    # ... key=value headers ...
    1 14.134725141734693790457251983562470270784257115699243175685 9.094947017729282e-13
    ...
    #checksum=sha256:<hex digest of the body lines>

Ordinate midpoints are written with enough decimal digits that re-parsing at
the table's precision reproduces the binary value bit-for-bit (verified at
save time, not assumed).  Radii are binary64 and round-trip through repr.

External zero datasets (one decimal ordinate per line, header-flagged
``method=external_trusted``) load into the same structure with a declared or
conservative default radius; such tables are marked as trusted-not-verified
and are excluded from rigorous-enclosure claims.
"""

import bisect
import hashlib
import math
import os
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence, Tuple

import gmpy2
from gmpy2 import mpfr

from ..enclosure import Enclosure, context, mpfr_to_decimal
from ..errors import DomainError, TableFormatError

__all__ = [
    "ZeroOrdinate",
    "CompletenessCertificate",
    "ZeroTable",
    "zero_table_io",
    "save_zero_table",
    "load_zero_table",
]

_FORMAT_MARK = "# zero-table v1"
_EXTERNAL_DEFAULT_RADIUS = 1e-8
_METHODS = ("turing_window", "external_trusted", "uncertified")


@dataclass(frozen=True)
class ZeroOrdinate:
    """One nontrivial-zero ordinate: a positive index (1-based position in
    the ordered table; None while still unindexed) and an enclosure of the
    height.  The first ordinate sits near 14.13, so a midpoint at or below
    14 always indicates corruption."""

    index: Optional[int]
    gamma: Enclosure

    def __post_init__(self):
        if self.index is not None and self.index < 1:
            raise DomainError(f"ordinate index must be >= 1, got {self.index}")
        if not float(self.gamma.midpoint) > 14.0:
            raise DomainError(
                f"ordinate midpoint {float(self.gamma.midpoint):.6f} is not > 14")
        if self.gamma.lower() <= 0.0:
            raise DomainError("ordinate enclosure must be strictly positive")


@dataclass(frozen=True)
class CompletenessCertificate:
    """Evidence that a zero list is complete below ``height``.

    For method ``turing_window`` the evidence records the window endpoints,
    the lower bound of the integral of the located step count, the upper
    bound of the integral of the smooth term, and the window bounds used;
    ``recheck`` re-verifies the inequality from those fields alone.  Method
    ``external_trusted`` states provenance, not proof; it has nothing to
    re-check and never participates in rigorous claims.
    """

    height: Enclosure
    zero_count: int
    method: str
    window_evidence: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if self.method not in ("turing_window", "external_trusted"):
            raise DomainError(f"unknown certificate method {self.method!r}")
        if self.zero_count < 0:
            raise DomainError("zero_count must be nonnegative")

    def recheck(self) -> bool:
        """Re-verify the stored window inequality (and the internal
        consistency of the bound fields) from the evidence alone."""
        if self.method == "external_trusted":
            return True  # provenance only; nothing checkable
        ev = self.window_evidence
        try:
            needed = ("t1", "t2", "window_width", "n_below",
                      "n_integral_lower", "l_integral_upper",
                      "s1_bound", "q_window_bound", "a0", "a1", "q_coeff")
            t1, t2, width, n_below, n_int, l_int, s1b, qwb, a0, a1, qc = (
                ev[k] for k in needed)
        except KeyError:
            return False
        # all arithmetic through explicit 256-bit context methods: python
        # operators on mpfr would round at the 53-bit thread default
        p = 256
        ctx = context(p)
        m1, m2 = mpfr(t1, p), mpfr(t2, p)
        if int(n_below) != self.zero_count:
            return False
        wd = ctx.sub(mpfr(width, p), ctx.sub(m2, m1))
        if abs(wd) > ctx.mul(mpfr("1e-40", p), abs(m2)):
            return False
        # stored one-sided bounds must dominate their defining formulas
        slack = mpfr("1e-10", p)
        s1_formula = ctx.mul(
            mpfr(2), ctx.add(mpfr(a0, p), ctx.mul(mpfr(a1, p), ctx.log(m2))))
        if mpfr(s1b, p) < ctx.sub(s1_formula, slack):
            return False
        q_formula = ctx.mul(mpfr(qc, p), ctx.log(ctx.div(m2, m1)))
        if mpfr(qwb, p) < ctx.sub(q_formula, slack):
            return False

        two_pi = ctx.mul(mpfr(2), ctx.const_pi())
        four_pi = ctx.mul(mpfr(4), ctx.const_pi())
        eight_pi = ctx.mul(mpfr(8), ctx.const_pi())

        def antideriv(m):
            sq = ctx.mul(m, m)
            a = ctx.mul(ctx.div(sq, four_pi), ctx.log(ctx.div(m, two_pi)))
            b = ctx.div(ctx.mul(mpfr(3), sq), eight_pi)
            c = ctx.div(ctx.mul(mpfr(7), m), mpfr(8))
            return ctx.add(ctx.sub(a, b), c)

        l_formula = ctx.sub(antideriv(m2), antideriv(m1))
        if mpfr(l_int, p) < ctx.sub(l_formula, ctx.mul(slack, abs(l_formula))):
            return False
        # the completeness inequality itself
        lhs = mpfr(n_int, p)
        rhs = ctx.sub(
            ctx.add(ctx.add(mpfr(l_int, p), mpfr(s1b, p)), mpfr(qwb, p)),
            mpfr(width, p))
        return lhs > rhs


class ZeroTable:
    """Ordered, contiguously indexed ordinate enclosures plus certificate
    and provenance metadata.  Validation happens once at construction."""

    __slots__ = ("zeros", "certificate", "source", "_lo_f", "_up_f")

    def __init__(self, zeros: Sequence[ZeroOrdinate],
                 certificate: Optional[CompletenessCertificate] = None,
                 source: Optional[Mapping[str, str]] = None):
        zs: Tuple[ZeroOrdinate, ...] = tuple(zeros)
        lo = tuple(z.gamma.lower() for z in zs)
        up = tuple(z.gamma.upper() for z in zs)
        for k, z in enumerate(zs):
            if z.index != k + 1:
                raise DomainError(
                    f"indices must run 1..n contiguously; position {k} holds "
                    f"index {z.index}")
            if k and not lo[k] > up[k - 1]:
                raise DomainError(
                    f"ordinate enclosures must be disjoint and increasing; "
                    f"violated between indices {k} and {k + 1}")
        if certificate is not None and zs:
            if certificate.height.upper_q() < zs[-1].gamma.upper_q():
                raise DomainError(
                    "certified height lies below the last ordinate's upper bound")
        self.zeros = zs
        self.certificate = certificate
        self.source = dict(source or {})
        self._lo_f = lo
        self._up_f = up
        target = self.source.get("target_radius")
        if target is not None:
            try:
                limit = float(target) * (1.0 + 1e-9)
            except ValueError:
                raise DomainError(f"bad target_radius metadata {target!r}")
            for z in zs:
                if float(z.gamma.radius) > limit:
                    raise DomainError(
                        f"ordinate {z.index} has radius {float(z.gamma.radius):.3e} "
                        f"above the table target {target}")

    def __len__(self):
        return len(self.zeros)

    def __iter__(self):
        return iter(self.zeros)

    @property
    def certified_height(self) -> Optional[Enclosure]:
        return self.certificate.height if self.certificate else None

    @property
    def is_rigorous(self) -> bool:
        """True when completeness was established by the window test (not
        merely trusted from an external source)."""
        return (self.certificate is not None
                and self.certificate.method == "turing_window")

    def count_at_most(self, t_upper: float) -> int:
        """Number of ordinates whose enclosure upper bound is <= t_upper
        (float comparison; use the counting module for exact counts)."""
        return bisect.bisect_right(self._up_f, t_upper)


# ----------------------------------------------------------------------
# serialization
# ----------------------------------------------------------------------

def _render_midpoint(m: mpfr, p: int) -> str:
    """Decimal rendering of an ordinate midpoint with verified bit-exact
    round-trip at precision p."""
    sig = max(20, math.ceil(p * math.log10(2)) + 2)
    for extra in (0, 2, 4, 8):
        s = format(mpfr_to_decimal(m, sig + extra), "f")
        if mpfr(s, p) == m:
            return s
    raise TableFormatError(
        "could not render a midpoint with exact decimal round-trip")


def _render_radius(r: mpfr) -> str:
    rf = float(r)
    if mpfr(rf, 64) < r:  # never shrink a radius in transit
        rf = math.nextafter(rf, math.inf)
    return repr(rf)


def _table_precision(table: ZeroTable) -> int:
    """The single precision the whole file is parsed back at: the widest
    enclosure precision present (embedding narrower values is exact)."""
    bits = [z.gamma.precision_bits for z in table.zeros]
    if table.certificate is not None:
        bits.append(table.certificate.height.precision_bits)
    return max(bits, default=192)


def _body_lines(table: ZeroTable, p_table: int) -> list:
    lines = []
    for z in table.zeros:
        mid = _render_midpoint(mpfr(z.gamma.midpoint, p_table), p_table)
        rad = _render_radius(z.gamma.radius)
        lines.append(f"{z.index} {mid} {rad}")
    return lines


def save_zero_table(path, table: ZeroTable) -> None:
    """Write a table to ``path`` in the text format above.  Refuses a table
    that is neither certified nor explicitly flagged uncertified."""
    cert = table.certificate
    flagged = str(table.source.get("uncertified", "")).lower() in ("1", "true", "yes")
    if cert is None and not flagged:
        raise DomainError(
            "refusing to save an uncertified table without an explicit "
            "uncertified flag in its source metadata")
    p_table = _table_precision(table)
    headers = [_FORMAT_MARK, f"# count={len(table.zeros)}",
               f"# precision_bits={p_table}"]
    skip = {"count", "precision_bits", "method", "certified_height",
            "certified_height_radius", "cert_zero_count"}
    for key in sorted(table.source):
        if key in skip or key.startswith("cert_ev_"):
            continue
        headers.append(f"# {key}={table.source[key]}")
    method = cert.method if cert else "uncertified"
    headers.append(f"# method={method}")
    if cert is not None:
        h = cert.height
        headers.append(f"# certified_height="
                       f"{_render_midpoint(mpfr(h.midpoint, p_table), p_table)}")
        headers.append(f"# certified_height_radius={_render_radius(h.radius)}")
        headers.append(f"# cert_zero_count={cert.zero_count}")
        for key in sorted(cert.window_evidence):
            headers.append(f"# cert_ev_{key}={cert.window_evidence[key]}")
    body = _body_lines(table, p_table)
    digest = hashlib.sha256(
        "".join(line + "\n" for line in body).encode()).hexdigest()
    text = "\n".join(headers + body) + f"\n#checksum=sha256:{digest}\n"
    tmp = str(path) + ".tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _parse_headers(lines):
    """Split raw lines into (headers dict, body start index).  External
    files need not carry our format mark but must flag themselves in a
    header before any data."""
    headers = {}
    for i, raw in enumerate(lines):
        s = raw.strip()
        if s.startswith("#checksum=") or (s and not s.startswith("#")):
            # the checksum line belongs to the body region even when no
            # ordinate lines precede it (an empty table)
            return headers, i
        if s == _FORMAT_MARK or not s:
            continue
        kv = s.lstrip("#").strip()
        if "=" in kv:
            key, _, val = kv.partition("=")
            headers[key.strip()] = val.strip()
        elif kv:
            headers[kv] = "true"
    return headers, len(lines)


def load_zero_table(path) -> ZeroTable:
    """Parse a table file (native or external format); errors carry the
    offending 1-based line number."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise TableFormatError("empty file", 1)
    headers, body_start = _parse_headers(lines)
    method = headers.get("method")
    if method is None and headers.get("external_trusted") == "true":
        method = "external_trusted"
    if method is None:
        raise TableFormatError("missing method header", 1)
    if method not in _METHODS:
        raise TableFormatError(f"unknown method {method!r}", 1)
    external = method == "external_trusted"

    try:
        p = int(headers.get("precision_bits", 192))
        default_radius = float(headers.get("radius", _EXTERNAL_DEFAULT_RADIUS))
        declared_count = int(headers["count"]) if "count" in headers else None
    except ValueError as exc:
        raise TableFormatError(f"malformed header ({exc})", 1) from None
    if p < 24 or not (0 <= default_radius < math.inf):
        raise TableFormatError("implausible precision_bits or radius header", 1)

    body = []
    checksum = None
    checksum_line = None
    for ln, raw in enumerate(lines[body_start:], start=body_start + 1):
        s = raw.strip()
        if not s:
            raise TableFormatError("blank line inside table body", ln)
        if s.startswith("#checksum="):
            checksum = s[len("#checksum="):]
            checksum_line = ln
            continue
        if checksum is not None:
            raise TableFormatError("data after checksum line", ln)
        if s.startswith("#"):
            raise TableFormatError("header line inside table body", ln)
        body.append((ln, s))

    zeros = []
    prev_upper = None
    prev_index = 0
    for ln, s in body:
        toks = s.split()
        try:
            if external and len(toks) == 1:
                idx = prev_index + 1
                mid = mpfr(toks[0], p)
                rad = default_radius
            elif len(toks) == 3:
                idx = int(toks[0])
                mid = mpfr(toks[1], p)
                rad = float(toks[2])
            else:
                raise ValueError("expected 'index ordinate radius'")
            if rad < 0 or not math.isfinite(rad):
                raise ValueError("radius must be a finite nonnegative real")
        except ValueError as exc:
            raise TableFormatError(f"malformed ordinate line ({exc})", ln) from None
        if idx != prev_index + 1:
            raise TableFormatError(
                f"index {idx} breaks 1..n contiguity (expected {prev_index + 1})", ln)
        enc = Enclosure(mid, mpfr(rad, 64), p)
        if prev_upper is not None and not enc.lower() > prev_upper:
            raise TableFormatError(
                f"ordinate {float(mid):.9f} is not strictly above its "
                f"predecessor; table must be increasing and disjoint", ln)
        prev_upper = enc.upper()
        prev_index = idx
        try:
            zeros.append(ZeroOrdinate(idx, enc))
        except DomainError as exc:
            raise TableFormatError(str(exc), ln) from None

    if declared_count is not None and declared_count != len(zeros):
        raise TableFormatError(
            f"header count={declared_count} but body has {len(zeros)} ordinates",
            checksum_line or len(lines))
    if not external:
        if checksum is None:
            raise TableFormatError("missing #checksum line", len(lines))
        digest = hashlib.sha256(
            "".join(s + "\n" for _, s in body).encode()).hexdigest()
        if checksum != f"sha256:{digest}":
            raise TableFormatError("body checksum mismatch", checksum_line)
    elif checksum is not None:
        digest = hashlib.sha256(
            "".join(s + "\n" for _, s in body).encode()).hexdigest()
        if checksum != f"sha256:{digest}":
            raise TableFormatError("body checksum mismatch", checksum_line)

    certificate = None
    if method in ("turing_window", "external_trusted"):
        try:
            if "certified_height" in headers:
                hmid = mpfr(headers["certified_height"], p)
                hrad = float(headers.get("certified_height_radius", 0.0))
                height = Enclosure(hmid, mpfr(hrad, 64), p)
            elif zeros:
                height = zeros[-1].gamma
            else:
                raise TableFormatError(
                    "certified table with no height and no zeros", 1)
            count = int(headers.get("cert_zero_count", len(zeros)))
        except ValueError as exc:
            raise TableFormatError(f"malformed certificate header ({exc})", 1) from None
        evidence = {k[len("cert_ev_"):]: v for k, v in headers.items()
                    if k.startswith("cert_ev_")}
        certificate = CompletenessCertificate(height, count, method, evidence)

    source_skip = {"count", "method", "certified_height",
                   "certified_height_radius", "cert_zero_count"}
    source = {k: v for k, v in headers.items()
              if k not in source_skip and not k.startswith("cert_ev_")}
    if method == "uncertified":
        source.setdefault("uncertified", "true")
    try:
        return ZeroTable(zeros, certificate, source)
    except DomainError as exc:
        raise TableFormatError(str(exc)) from None


def zero_table_io(mode: str, path, table: Optional[ZeroTable] = None):
    """Single entry point for table persistence: mode 'save' writes
    ``table`` to ``path``; mode 'load' parses ``path`` into a ZeroTable."""
    if mode == "save":
        if table is None:
            raise DomainError("save mode requires a table")
        return save_zero_table(path, table)
    if mode == "load":
        return load_zero_table(path)
    raise DomainError(f"unknown zero_table_io mode {mode!r}")
