"""Explicit zero-counting bounds for the critical line.

Houses the smooth main term L(T) of the zero-counting function N(T), the
residual Q(T) = N(T) - L(T) recovered from a certified zero table, and the
explicit one-sided bounds the estimators and the completeness certifier
consume:

- the windowed bound on the antiderivative of the argument term,
  |S1(t2) - S1(t1)| <= 2(A0 + A1 log t2), valid for 2*pi <= t1 <= t2
  (Backlund/Trudgian-style explicit constants);
- the tail bound (c0 + c1 log T)/T^2 for the accelerated estimator;
- the truncation bound A(2 log T + 1)/T for the naive estimator
  (Lehman's shape with a sharpened constant).

Bound functions return upward-rounded plain floats, not enclosures: each is
already a one-sided bound, so rounding up preserves validity and keeps them
trivial to fold into an estimate's radius.  L(T) and Q(T), by contrast, are
two-sided quantities and come back as Enclosures.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

from gmpy2 import mpfr

from .enclosure import (
    Enclosure,
    _const_ball,
    _wrap,
    b_add,
    b_div,
    b_from_int,
    b_log,
    b_mul,
    b_mul_int,
    b_sqr,
    b_sub,
    context,
    require_precision,
    ulp,
)
from .errors import AmbiguityError, DomainError

__all__ = [
    "BoundParams",
    "DEFAULT_PARAMS",
    "big_l",
    "big_l_integral",
    "q_from_zeros",
    "s1_window_bound",
    "e2_bound",
    "lehman_bound",
]


@dataclass(frozen=True)
class BoundParams:
    """Literal constants of the explicit bounds.

    These are published values, not tunables; a test pins each digit.  a0/a1
    are the S1-window constants, trudgian_q bounds |Q(T) - S(T)| <= 0.2/T
    for T >= 2*pi, lehman_a sharpens Lehman's truncation constant, and
    e2_c0/e2_c1 bound the accelerated tail.  t0 is the validity floor of
    the S1 bound.
    """

    a0: float = 2.067
    a1: float = 0.059
    trudgian_q: float = 0.2
    lehman_a: float = 0.28
    e2_c0: float = 4.27
    e2_c1: float = 0.12
    t0: float = math.tau


DEFAULT_PARAMS = BoundParams()

# One-sided float bounds below are computed with a handful of IEEE ops (each
# within 1 ulp, including libm log) and then pushed up by a relative fudge
# comfortably above the accumulated rounding; validity never depends on the
# last bits.
_UP = 1.0 + 2.0 ** -45

# Callers routinely pass the double rounding of 2*pi (or 2*pi*e), which sits
# just below the exact threshold; admit arguments within this relative slack
# of the domain edge rather than punishing the representation error.
_EDGE_SLACK = 1.0 - 2.0 ** -45

_TAU = math.tau
_TWO_PI_E = math.tau * math.e


def _ball_in(ctx, p, t):
    """Normalize a height given as Enclosure, str, int, float, or mpfr to a
    raw (midpoint, radius) ball at precision p."""
    if isinstance(t, Enclosure):
        m = ctx.add(t.midpoint, mpfr(0))
        r = float(t.radius)
        if m != t.midpoint:
            r += ulp(m, p)
        return m, r
    if isinstance(t, str):
        m = mpfr(t, p)
        return m, ulp(m, p)
    if isinstance(t, (int, float, mpfr)):
        m = mpfr(t, p)
        r = 0.0 if m == t else ulp(m, p)
        return m, r
    raise DomainError(f"cannot interpret {type(t).__name__} as a height")


def _upper_float(t) -> float:
    if isinstance(t, Enclosure):
        return t.upper()
    return float(t)


def _require_at_least(t, threshold: float, what: str):
    if _upper_float(t) < threshold * _EDGE_SLACK:
        raise DomainError(f"{what} requires height >= {threshold:.6f}")


def _l_raw(ctx, p, tm, tr):
    # L(T) = u (log u - 1) + 7/8 with u = T / (2 pi)
    m2p, r2p = _const_ball(ctx, p, "two_pi")
    um, ur = b_div(ctx, p, tm, tr, m2p, r2p)
    lm, lr = b_log(ctx, p, um, ur)
    lm, lr = b_sub(ctx, p, lm, lr, mpfr(1), 0.0)
    pm, pr = b_mul(ctx, p, um, ur, lm, lr)
    return b_add(ctx, p, pm, pr, mpfr("0.875", p), 0.0)


def big_l(t, precision_bits: int = 192) -> Enclosure:
    """Enclosure of the smooth term L(T) = (T/2pi)(log(T/2pi) - 1) + 7/8
    of the counting function N(T) = L(T) + Q(T), for T >= 2*pi."""
    require_precision(precision_bits, 24, "big_l")
    _require_at_least(t, _TAU, "big_l")
    p = precision_bits
    ctx = context(p)
    tm, tr = _ball_in(ctx, p, t)
    return _wrap(p, _l_raw(ctx, p, tm, tr))


def _l_antideriv_raw(ctx, p, tm, tr):
    # F(T) = (T^2/4pi) log(T/2pi) - 3 T^2/(8 pi) + 7T/8; F' = L.
    m2p, r2p = _const_ball(ctx, p, "two_pi")
    mpi, rpi = _const_ball(ctx, p, "pi")
    um, ur = b_div(ctx, p, tm, tr, m2p, r2p)
    lgm, lgr = b_log(ctx, p, um, ur)
    sqm, sqr = b_sqr(ctx, p, tm, tr)
    # T^2 / (4 pi) * log(T/2pi)
    m4pi, r4pi = b_mul_int(ctx, p, mpi, rpi, 4)
    am, ar = b_div(ctx, p, sqm, sqr, m4pi, r4pi)
    am, ar = b_mul(ctx, p, am, ar, lgm, lgr)
    # 3 T^2 / (8 pi)
    bm, br = b_div(ctx, p, sqm, sqr, mpi, rpi)
    bm, br = b_mul(ctx, p, bm, br, mpfr("0.375", p), 0.0)
    fm, fr = b_sub(ctx, p, am, ar, bm, br)
    # 7T/8
    cm, cr = b_mul(ctx, p, tm, tr, mpfr("0.875", p), 0.0)
    return b_add(ctx, p, fm, fr, cm, cr)


def big_l_integral(t1, t2, precision_bits: int = 192) -> Enclosure:
    """Enclosure of the exact integral of L over [t1, t2], via the closed
    antiderivative F(T) = (T^2/4pi) log(T/2pi) - 3T^2/(8pi) + 7T/8."""
    require_precision(precision_bits, 24, "big_l_integral")
    _require_at_least(t1, _TAU, "big_l_integral")
    p = precision_bits
    ctx = context(p)
    m1, r1 = _ball_in(ctx, p, t1)
    m2, r2 = _ball_in(ctx, p, t2)
    f1 = _l_antideriv_raw(ctx, p, m1, r1)
    f2 = _l_antideriv_raw(ctx, p, m2, r2)
    return _wrap(p, b_sub(ctx, p, f2[0], f2[1], f1[0], f1[1]))


def _count_below(table, t_lo_q: Fraction, t_hi_q: Fraction) -> int:
    """Exact count of table ordinates whose enclosures lie wholly below the
    query band [t_lo_q, t_hi_q]; AmbiguityError if any enclosure meets it."""
    n = 0
    for z in table.zeros:
        g = z.gamma
        # cheap outward float test first, exact Fractions only near the edge
        if g.upper() < float(t_lo_q) * (1 - 2.0 ** -40) - 2.0 ** -40:
            n += 1
            continue
        if g.lower() > float(t_hi_q) * (1 + 2.0 ** -40) + 2.0 ** -40:
            continue
        if g.upper_q() <= t_lo_q:
            n += 1
        elif g.lower_q() > t_hi_q:
            continue
        else:
            raise AmbiguityError(
                f"height {float(t_lo_q):.6f} lies inside the enclosure of "
                f"ordinate index {z.index}; counts are undefined there")
    return n


def q_from_zeros(t, table, precision_bits: int = 192) -> Enclosure:
    """Enclosure of the residual Q(T) = N(T) - L(T), with N(T) the exact
    count of table ordinates <= T.

    Requires a certified table, T at or below its certified height, and T
    outside every ordinate enclosure (otherwise the count is ambiguous).
    """
    require_precision(precision_bits, 24, "q_from_zeros")
    if getattr(table, "certificate", None) is None:
        raise DomainError("q_from_zeros needs a certified zero table")
    p = precision_bits
    ctx = context(p)
    tm, tr = _ball_in(ctx, p, t)
    t_ball = _wrap(p, (tm, tr))
    height = table.certificate.height
    if t_ball.upper_q() > height.upper_q():
        raise DomainError(
            f"height {t_ball.upper():.6f} is above the certified height "
            f"{height.upper():.6f}")
    n = _count_below(table, t_ball.lower_q(), t_ball.upper_q())
    lm, lr = _l_raw(ctx, p, tm, tr)
    nm, nr = b_from_int(ctx, p, n)
    return _wrap(p, b_sub(ctx, p, nm, nr, lm, lr))


def s1_window_bound(t1, t2, params: BoundParams = DEFAULT_PARAMS) -> float:
    """Upper bound 2(a0 + a1 log t2) for |S1(t2) - S1(t1)|, the change of
    the integrated argument term over [t1, t2]; valid for 2*pi <= t1 <= t2.
    The unknown additive constant in the underlying one-point bound cancels
    in the difference, so only the difference is ever exposed."""
    f1, f2 = _upper_float(t1), _upper_float(t2)
    _require_at_least(t1, params.t0, "s1_window_bound")
    if f2 < f1 * _EDGE_SLACK:
        raise DomainError("s1_window_bound needs t1 <= t2")
    return 2.0 * (params.a0 + params.a1 * math.log(f2)) * _UP


def e2_bound(t, params: BoundParams = DEFAULT_PARAMS) -> float:
    """Upper bound (c0 + c1 log T)/T^2 for the accelerated estimator's tail
    error; valid for T >= 2*pi."""
    _require_at_least(t, params.t0, "e2_bound")
    f = _lower_float_for_bound(t)
    return (params.e2_c0 + params.e2_c1 * math.log(_upper_float(t))) / (f * f) * _UP


def lehman_bound(t, params: BoundParams = DEFAULT_PARAMS) -> float:
    """Upper bound A(2 log T + 1)/T for the naive estimator's truncation
    error, with the sharpened constant A = 0.28; valid for T >= 2*pi*e."""
    _require_at_least(t, _TWO_PI_E, "lehman_bound")
    f = _lower_float_for_bound(t)
    return params.lehman_a * (2.0 * math.log(_upper_float(t)) + 1.0) / f * _UP


def _lower_float_for_bound(t) -> float:
    """Lower float bound of a height, for denominators of decreasing bounds
    (rounding the denominator down keeps the bound one-sided)."""
    if isinstance(t, Enclosure):
        return t.lower()
    return float(t) * _EDGE_SLACK
