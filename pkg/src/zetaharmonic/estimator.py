"""Harmonic-sum estimators over certified zero tables.

The target quantity is the limit H of G(T) - log^2(T/2pi)/(4pi) as T grows,
where G(T) sums the reciprocals of the nontrivial-zero ordinates up to T.
Two truncated estimators are provided:

* naive: G(T) - log^2(T/2pi)/(4pi), whose tail error decays like log T / T
  (bounded by Lehman's explicit constant);
* accelerated: sum of (1/gamma - 1/T) minus (log^2(T/(2pi e)) + 1)/(4pi)
  plus 7/(8T), an exact rearrangement whose tail decays like log T / T^2.

Every computable term is evaluated in enclosure arithmetic with ascending,
fixed-order summation (bit-reproducible); the non-computable tail enters
only as an explicit bound folded into the result's radius.  A fast mode
evaluates the same formulas in plain float64 for exploration; it makes no
containment claim and is never used by the rigorous checks.

The module also houses the reference value of the limit published to 18
decimals, the shifted variant of the limit (offset by log^2(2pi)/(4pi),
Hassani's normalization), and a rigorous checker for the inequality
G(T) <= log^2(T/2pi)/(4pi), valid for all T >= 4 pi e (Büthe's bound).
"""

import math
from dataclasses import dataclass
from decimal import Decimal, ROUND_HALF_EVEN, localcontext
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Union

from gmpy2 import mpfr

from .counting import e2_bound, lehman_bound, DEFAULT_PARAMS, _count_below
from .enclosure import (Enclosure, enc_apply, enc_const, enc_from,
                        mpfr_to_decimal, require_precision)
from .errors import DomainError
from .zeros.table import ZeroTable

# Reference value of the limit, determined independently to 18 decimals;
# used by verification suites as an envelope anchor, never as an input.
H_REFERENCE = "-0.0171594043070981495"
H_REFERENCE_RADIUS = 1e-18
# The same limit under the shifted normalization (offset log^2(2pi)/(4pi)).
H_SHIFTED_REFERENCE = "0.2516367513127059665"


@dataclass(frozen=True)
class HEstimate:
    """A truncated estimate of the limit with its error budget split into
    the computable part (value, an enclosure) and the explicit tail bound.
    `total` folds the tail bound into the radius, so it contains the limit
    whenever the underlying table is rigorous."""
    method: str          # "naive" or "accelerated"
    T: Enclosure         # truncation height actually used
    n_zeros: int         # ordinates included in the sum
    value: Enclosure     # computable part
    tail_bound: float    # explicit bound on the omitted tail
    total: Enclosure     # value with tail_bound folded into the radius
    fast: bool = False   # float64 evaluation; no containment claim


def _widen(e: Enclosure, extra: float) -> Enclosure:
    """Fold a nonnegative float bound into an enclosure's radius
    (outward-rounded)."""
    if extra < 0:
        raise DomainError("tail bound must be nonnegative")
    r = math.nextafter(float(e.radius) + extra, math.inf)
    r *= 1.0 + 2.0 ** -50
    return Enclosure(e.midpoint, mpfr(r, 64), e.precision_bits)


def _exact_point(x, p: int) -> Enclosure:
    return Enclosure(mpfr(x, p), mpfr(0, 64), p)


def _as_height(t, p: int) -> Enclosure:
    """Normalize a height argument to an enclosure at working precision."""
    if isinstance(t, Enclosure):
        return t
    if isinstance(t, (int, float, mpfr, str, Fraction)):
        return enc_from(t, p)  # exact for binary values, 1-ulp pad for str
    raise DomainError(f"unsupported height type {type(t).__name__}")


def _check_table(table: ZeroTable, allow_uncertified: bool) -> None:
    if not isinstance(table, ZeroTable):
        raise DomainError("first argument must be a ZeroTable")
    if table.is_rigorous:
        return
    if not allow_uncertified:
        raise DomainError(
            "table has no completeness certificate that can be re-checked; "
            "pass allow_uncertified=True to accept a non-rigorous result")


def _included_count(table: ZeroTable, t_up_q: Fraction) -> int:
    """Number of leading ordinates with enclosure upper bound <= the height
    upper bound; a straddling enclosure makes the count ambiguous.

    Tables carrying a certificate (proved or declared) enforce their height;
    a table with no certificate at all is only reachable through
    allow_uncertified, where the caller has already accepted that the list
    may be incomplete anywhere."""
    if table.certificate is not None and \
            t_up_q > table.certificate.height.upper_q():
        raise DomainError(
            "height exceeds the range the table is known to cover")
    return _count_below(table, t_up_q, t_up_q)


def g_sum(table: ZeroTable, t, *, precision_bits: int = 192,
          allow_uncertified: bool = False, fast: bool = False) -> Enclosure:
    """Enclosure of the sum of 1/gamma over ordinates gamma <= T.

    Ordinates are included when their enclosure's upper bound is at most
    T's upper bound; an ordinate enclosure straddling T raises rather than
    guessing.  Ascending fixed-order summation keeps the result identical
    across runs and thread counts.
    """
    require_precision(precision_bits, 53, "harmonic summation")
    p = precision_bits
    _check_table(table, allow_uncertified)
    te = _as_height(t, p)
    n = _included_count(table, te.upper_q())
    if fast:
        s = 0.0
        for z in table.zeros[:n]:
            s += 1.0 / float(z.gamma.midpoint)
        return _exact_point(s, p)
    one = _exact_point(1, p)
    acc = _exact_point(0, p)
    for z in table.zeros[:n]:
        acc = enc_apply("add", (acc, enc_apply("div", (one, z.gamma), p)), p)
    return acc


def _resolve_height(table: ZeroTable, t, count: Optional[int],
                    p: int) -> Enclosure:
    if (t is None) == (count is None):
        raise DomainError("give exactly one of a height or count=")
    if count is not None:
        if count < 0:
            raise DomainError("count must be nonnegative")
        if count > len(table.zeros):
            raise DomainError(
                f"table holds only {len(table.zeros)} zeros, "
                f"cannot truncate at count {count}")
        if count == 0:
            raise DomainError("count 0 leaves no truncation height; pass a "
                              "height instead")
        return table.zeros[count - 1].gamma
    return _as_height(t, p)


def naive_estimate(table: ZeroTable, t=None, *, count: Optional[int] = None,
                   precision_bits: int = 192,
                   allow_uncertified: bool = False,
                   fast: bool = False) -> HEstimate:
    """Truncated estimate G(T) - log^2(T/2pi)/(4pi) with the explicit
    first-order tail bound; requires T >= 2 pi e."""
    require_precision(precision_bits, 53, "estimation")
    p = precision_bits
    _check_table(table, allow_uncertified)
    te = _resolve_height(table, t, count, p)
    tail = lehman_bound(te, DEFAULT_PARAMS)  # also enforces T >= 2 pi e
    n = _included_count(table, te.upper_q())
    if fast:
        tf = float(te.midpoint)
        s = sum(1.0 / float(z.gamma.midpoint) for z in table.zeros[:n])
        v = s - math.log(tf / math.tau) ** 2 / (4.0 * math.pi)
        ve = _exact_point(v, p)
        return HEstimate("naive", _exact_point(tf, p), n, ve, tail,
                         _widen(ve, tail), fast=True)
    g = g_sum(table, te, precision_bits=p,
              allow_uncertified=allow_uncertified)
    u = enc_apply("div", (te, enc_const("two_pi", p + 16)), p + 16)
    sq = enc_apply("sqr", (enc_apply("log", (u,), p + 16),), p + 16)
    four_pi = enc_apply("mul", (_exact_point(4, p + 16),
                                enc_const("pi", p + 16)), p + 16)
    value = enc_apply("sub", (g, enc_apply("div", (sq, four_pi), p)), p)
    return HEstimate("naive", te, n, value, tail, _widen(value, tail))


def accelerated_estimate(table: ZeroTable, t=None, *,
                         count: Optional[int] = None,
                         precision_bits: int = 192,
                         allow_uncertified: bool = False,
                         fast: bool = False) -> HEstimate:
    """Truncated estimate sum(1/gamma - 1/T) - (log^2(T/(2pi e)) + 1)/(4pi)
    + 7/(8T), an exact rearrangement with a second-order tail bound;
    requires T >= 2 pi."""
    require_precision(precision_bits, 53, "estimation")
    p = precision_bits
    _check_table(table, allow_uncertified)
    te = _resolve_height(table, t, count, p)
    tail = e2_bound(te, DEFAULT_PARAMS)  # also enforces T >= 2 pi
    n = _included_count(table, te.upper_q())
    if fast:
        tf = float(te.midpoint)
        s = sum(1.0 / float(z.gamma.midpoint) - 1.0 / tf
                for z in table.zeros[:n])
        v = (s - (math.log(tf / (math.tau * math.e)) ** 2 + 1.0)
             / (4.0 * math.pi) + 7.0 / (8.0 * tf))
        ve = _exact_point(v, p)
        return HEstimate("accelerated", _exact_point(tf, p), n, ve, tail,
                         _widen(ve, tail), fast=True)
    one = _exact_point(1, p)
    inv_t = enc_apply("div", (one, te), p)
    acc = _exact_point(0, p)
    for z in table.zeros[:n]:
        term = enc_apply("sub", (enc_apply("div", (one, z.gamma), p), inv_t),
                         p)
        acc = enc_apply("add", (acc, term), p)
    u = enc_apply("div", (te, enc_const("two_pi_e", p + 16)), p + 16)
    sq = enc_apply("sqr", (enc_apply("log", (u,), p + 16),), p + 16)
    sq1 = enc_apply("add", (sq, _exact_point(1, p + 16)), p + 16)
    four_pi = enc_apply("mul", (_exact_point(4, p + 16),
                                enc_const("pi", p + 16)), p + 16)
    smooth = enc_apply("div", (sq1, four_pi), p)
    last = enc_apply("div", (_exact_point(mpfr("0.875", p), p), te), p)
    value = enc_apply("add", (enc_apply("sub", (acc, smooth), p), last), p)
    return HEstimate("accelerated", te, n, value, tail, _widen(value, tail))


def shift_constant(precision_bits: int = 192) -> Enclosure:
    """Enclosure of log^2(2pi)/(4pi), the offset between the plain and
    shifted normalizations of the limit."""
    p = precision_bits
    lt = enc_const("log_two_pi", p + 16)
    sq = enc_apply("sqr", (lt,), p + 16)
    four_pi = enc_apply("mul", (_exact_point(4, p + 16),
                                enc_const("pi", p + 16)), p + 16)
    return enc_apply("div", (sq, four_pi), p)


def hassani_shift(est: Union[HEstimate, Enclosure]
                  ) -> Union[HEstimate, Enclosure]:
    """Shift an estimate of the limit to the normalization offset by
    log^2(2pi)/(4pi); accepts and returns either an HEstimate or a bare
    enclosure."""
    if isinstance(est, Enclosure):
        return enc_apply("add",
                         (est, shift_constant(est.precision_bits)),
                         est.precision_bits)
    if not isinstance(est, HEstimate):
        raise DomainError("hassani_shift takes an HEstimate or Enclosure")
    p = est.value.precision_bits
    c = shift_constant(p)
    value = enc_apply("add", (est.value, c), p)
    total = enc_apply("add", (est.total, c), p)
    return HEstimate(est.method, est.T, est.n_zeros, value, est.tail_bound,
                     total, fast=est.fast)


def buthe_check(table: ZeroTable, sample_heights: Sequence, *,
                precision_bits: int = 192,
                allow_uncertified: bool = False) -> List[Dict[str, str]]:
    """Rigorously test G(T) <= log^2(T/2pi)/(4pi) at each sampled height
    (the inequality holds for every T >= 4 pi e).

    Per-height status is "pass" only when the G enclosure's upper bound is
    at most the right side's lower bound, "fail" only when the G lower
    bound exceeds the right side's upper bound, and "inconclusive" when the
    enclosures overlap — an overlap is never reported as a pass.
    """
    require_precision(precision_bits, 53, "inequality check")
    p = precision_bits
    _check_table(table, allow_uncertified)
    floor = 4.0 * math.pi * math.e * (1.0 - 2.0 ** -45)
    out: List[Dict[str, str]] = []
    for t in sample_heights:
        te = _as_height(t, p)
        if float(te.midpoint) < floor:
            raise DomainError(
                "the inequality is only asserted for T >= 4*pi*e")
        g = g_sum(table, te, precision_bits=p,
                  allow_uncertified=allow_uncertified)
        u = enc_apply("div", (te, enc_const("two_pi", p + 16)), p + 16)
        sq = enc_apply("sqr", (enc_apply("log", (u,), p + 16),), p + 16)
        four_pi = enc_apply("mul", (_exact_point(4, p + 16),
                                    enc_const("pi", p + 16)), p + 16)
        rhs = enc_apply("div", (sq, four_pi), p)
        if g.upper_q() <= rhs.lower_q():
            status = "pass"
        elif g.lower_q() > rhs.upper_q():
            status = "fail"
        else:
            status = "inconclusive"
        out.append({"height": str(mpfr_to_decimal(te.midpoint, 20)),
                    "status": status,
                    "g_upper": str(mpfr_to_decimal(
                        mpfr(float(g.upper()), 64), 20)),
                    "rhs_lower": str(mpfr_to_decimal(
                        mpfr(float(rhs.lower()), 64), 20))})
    return out


def format_fixed12(x) -> str:
    """Render a value to 12 fractional decimal digits, round-half-even
    (the table display convention)."""
    if isinstance(x, Enclosure):
        x = x.midpoint
    if isinstance(x, HEstimate):
        raise DomainError("pass the estimate's value or total enclosure")
    q = Fraction(*mpfr(x).as_integer_ratio()) if not isinstance(x, Fraction) \
        else x
    with localcontext() as c:
        c.prec = 60
        d = Decimal(int(q.numerator)) / Decimal(int(q.denominator))
        return str(d.quantize(Decimal("1e-12"), rounding=ROUND_HALF_EVEN))
