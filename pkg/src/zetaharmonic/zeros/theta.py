"""Rigorous Riemann-Siegel theta function and Gram points.

theta(t) = Im log Gamma(1/4 + i t/2) - (t/2) log pi, with the continuous
branch of log Gamma.  Enclosures come from the Stirling series with a fully
explicit remainder bound; small heights are first shifted up by the
recurrence Gamma(z + M) = z (z+1) ... (z+M-1) Gamma(z) so that the same
bound applies everywhere down to t = 2.

Remainder bound (self-contained):  with z = a + ib, a > 0, and the series
truncated before the term with B_{2N},

    |R_N(z)| <= (2 |B_{2N}| / 2N) * I,   I = int_0^inf dx / |z+x|^{2N},

using |B_{2N}({x}) - B_{2N}| <= 2|B_{2N}| (the even periodic Bernoulli
polynomial attains its maximum modulus at the integers; see Olver,
"Asymptotics and Special Functions", ch. 8, or Edwards ch. 6).  For any
a >= 0 the quadratic (a+x)^2 + b^2 - (x+r)^2/2, r = |z|, has nonnegative
discriminant-free form: it equals x^2/2 + (2a-r)x + r^2/2, whose
discriminant is 4a(a-r) <= 0, so |z+x|^2 >= (x+r)^2 / 2 for all x >= 0.
Hence I <= 2^N r^{1-2N} / (2N-1) and

    |R_N(z)| <= |B_{2N}| 2^N / (N (2N-1) r^{2N-1}).

The same argument with the differentiated kernel gives, for the digamma
series truncated before B_{2N},

    |Rpsi_N(z)| <= |B_{2N}| 2^{N + 1/2} / (N r^{2N}).

Both bounds are monotone-decreasing in r, so a lower bound for r = |z|
(from ball arithmetic) keeps them valid.  The shift M is chosen so that
r >= max(50, 0.2 * precision_bits), which makes the minimum achievable
remainder (about e^{-4.4 r}) smaller than the target at any precision.
"""

from __future__ import annotations

import math
from fractions import Fraction

import gmpy2
from gmpy2 import mpfr

from ..enclosure import (
    Enclosure,
    _const_ball,
    _wrap,
    b_add,
    b_atan2,
    b_div,
    b_div_int,
    b_from_fraction,
    b_log,
    b_mul,
    b_mul_int,
    b_sqr,
    b_sub,
    context,
    enc_apply,
)
from ..errors import DomainError, InsufficientPrecisionError, RefinementError
from . import _cball as cb
from .bernoulli import bernoulli

__all__ = [
    "theta_ball",
    "theta_deriv_ball",
    "gram_point",
    "theta_f64",
    "theta_deriv_f64",
]

_LN2 = math.log(2.0)
_N_MAX = 400

# per-(kind, n, precision) cache of series coefficient balls
_COEFF_CACHE: dict = {}


def _coeff(kind: str, n: int, p: int):
    key = (kind, n, p)
    got = _COEFF_CACHE.get(key)
    if got is None:
        if kind == "lg":  # B_{2n} / ((2n-1)(2n)), the log-gamma series
            q = bernoulli(2 * n) / ((2 * n - 1) * (2 * n))
        else:  # "psi": B_{2n} / (2n)
            q = bernoulli(2 * n) / (2 * n)
        got = b_from_fraction(context(p), p, q)
        _COEFF_CACHE[key] = got
    return got


def _log_abs_bernoulli(two_n: int) -> float:
    """Upper bound for log |B_{2n}| from integer bit lengths."""
    q = bernoulli(two_n)
    return q.numerator.bit_length() * _LN2 - (q.denominator.bit_length() - 1) * _LN2


def _remainder_bound(two_n: int, n: int, log_r: float, even_power: bool) -> float:
    """Upper bound for the Stirling remainder, computed in log space to
    dodge overflow of the huge Bernoulli numerators."""
    if even_power:  # digamma: |B_{2N}| 2^{N+1/2} / (N r^{2N})
        lb = (_log_abs_bernoulli(two_n) + (n + 0.5) * _LN2
              - math.log(n) - 2 * n * log_r)
    else:  # log-gamma: |B_{2N}| 2^N / (N (2N-1) r^{2N-1})
        lb = (_log_abs_bernoulli(two_n) + n * _LN2
              - math.log(n * (2 * n - 1)) - (2 * n - 1) * log_r)
    lb += 1e-9  # slack for the float log arithmetic above
    return math.exp(lb) if lb < 700.0 else math.inf


def _tball(t, p: int):
    """Normalize a height argument to a (midpoint, radius) ball; t >= 2."""
    ctx = context(p)
    if isinstance(t, Enclosure):
        m = ctx.add(t.midpoint, mpfr(0))
        r = float(t.radius)
        if m != t.midpoint:
            from ..enclosure import ulp, _FUDGE
            r = (r + ulp(m, p)) * _FUDGE
    elif isinstance(t, str):
        from ..enclosure import ulp
        m = mpfr(t, p)
        r = ulp(m, p)
    else:
        m0 = mpfr(t) if not isinstance(t, mpfr) else t
        m = ctx.add(m0, mpfr(0))
        r = 0.0
        if m != m0:
            from ..enclosure import ulp, _FUDGE
            r = ulp(m, p) * _FUDGE
    if float(m) - r < 2.0:
        raise DomainError(f"height must be >= 2, got {t}")
    return m, r


def _shift_for(b_lo: float, p: int) -> int:
    """Shift amount making |z + M| large enough for the remainder target."""
    need = max(50.0, 0.2 * p)
    return 0 if b_lo >= need else math.ceil(need)


def _zprime(ctx, p, bm, br, M: int):
    """z' = 1/4 + M + ib as a complex ball, plus log lower bound of |z'|."""
    a = ctx.div(mpfr(4 * M + 1, p), 4)  # exact dyadic
    z = (a, 0.0, bm, br)
    nm, nr = cb.c_norm2(ctx, p, z)
    lo = float(nm) / (1.0 + 2.0 ** -50) - nr
    if lo <= 0.0:
        raise DomainError("degenerate height enclosure")
    return a, z, 0.5 * math.log(lo) - 1e-12


def _im_loggamma(ctx, p, bm, br, target_scale: float):
    """Ball for Im log Gamma(1/4 + ib), continuous branch."""
    b_lo = abs(float(bm)) / (1.0 + 2.0 ** -50) - br
    M = _shift_for(b_lo, p)
    a, z, log_r = _zprime(ctx, p, bm, br, M)

    # main terms: Im[(z'-1/2) log z' - z'] = (a-1/2) phi + b L - b
    s = cb.c_norm2(ctx, p, z)
    L = b_div_int(ctx, p, *b_log(ctx, p, *s), 2)
    phi = b_atan2(ctx, p, bm, br, a, 0.0)
    x = ctx.sub(a, ctx.div(mpfr(1, p), 2))  # exact dyadic
    acc = b_mul(ctx, p, x, 0.0, *phi)
    acc = b_add(ctx, p, *acc, *b_mul(ctx, p, bm, br, *L))
    acc = b_sub(ctx, p, *acc, bm, br)

    target = max(1.0, target_scale) * 2.0 ** (-p - 4)

    # Stirling series: sum_n c_n Im(w^{2n-1}), w = 1/z'
    w = cb.c_inv(ctx, p, z)
    w2 = cb.c_mul(ctx, p, w, w)
    pw = w
    for n in range(1, _N_MAX + 1):
        rem = _remainder_bound(2 * n, n, log_r, even_power=False)
        if rem <= target:
            acc = (acc[0], (acc[1] + rem) * (1.0 + 2.0 ** -50))
            break
        cm, cr = _coeff("lg", n, p)
        acc = b_add(ctx, p, *acc, *b_mul(ctx, p, cm, cr, pw[2], pw[3]))
        pw = cb.c_mul(ctx, p, pw, w2)
    else:
        raise InsufficientPrecisionError(
            "Stirling series did not reach the target remainder")

    # undo the shift: Im log Gamma(z) = Im log Gamma(z+M) - sum arg(z+k)
    for k in range(M):
        ak = ctx.div(mpfr(4 * k + 1, p), 4)
        acc = b_sub(ctx, p, *acc, *b_atan2(ctx, p, bm, br, ak, 0.0))
    return acc


def _re_digamma(ctx, p, bm, br):
    """Ball for Re psi(1/4 + ib)."""
    b_lo = abs(float(bm)) / (1.0 + 2.0 ** -50) - br
    M = _shift_for(b_lo, p)
    a, z, log_r = _zprime(ctx, p, bm, br, M)

    # main terms: Re[log z' - 1/(2 z')] = L - a / (2 |z'|^2)
    s = cb.c_norm2(ctx, p, z)
    L = b_div_int(ctx, p, *b_log(ctx, p, *s), 2)
    w = cb.c_inv(ctx, p, z)
    acc = b_sub(ctx, p, *L, *b_div_int(ctx, p, w[0], w[1], 2))

    target = max(1.0, abs(float(L[0]))) * 2.0 ** (-p - 4)

    # series: - sum_n (B_{2n}/2n) Re(w^{2n})
    w2 = cb.c_mul(ctx, p, w, w)
    pw = w2
    for n in range(1, _N_MAX + 1):
        rem = _remainder_bound(2 * n, n, log_r, even_power=True)
        if rem <= target:
            acc = (acc[0], (acc[1] + rem) * (1.0 + 2.0 ** -50))
            break
        cm, cr = _coeff("psi", n, p)
        acc = b_sub(ctx, p, *acc, *b_mul(ctx, p, cm, cr, pw[0], pw[1]))
        pw = cb.c_mul(ctx, p, pw, w2)
    else:
        raise InsufficientPrecisionError(
            "digamma series did not reach the target remainder")

    # undo the shift: Re psi(z) = Re psi(z+M) - sum a_k / (a_k^2 + b^2)
    if M:
        b2 = b_sqr(ctx, p, bm, br)
        for k in range(M):
            ak = ctx.div(mpfr(4 * k + 1, p), 4)
            den = b_add(ctx, p, ctx.square(ak), 0.0, *b2)
            acc = b_sub(ctx, p, *acc, *b_div(ctx, p, ak, 0.0, *den))
    return acc


def theta_raw(ctx, p, tm, tr):
    """theta(t) as a raw ball (midpoint, radius) for a height ball."""
    bm = ctx.div(tm, 2)  # exact
    br = tr * 0.5 * (1.0 + 2.0 ** -50)

    tf = abs(float(tm))
    scale = 0.5 * tf * max(1.0, abs(math.log(tf / (2 * math.pi)))) + 10.0
    ig = _im_loggamma(ctx, p, bm, br, scale)

    pim, pir = _const_ball(ctx, p, "pi")
    lp = b_log(ctx, p, pim, pir)
    return b_sub(ctx, p, *ig, *b_mul(ctx, p, bm, br, *lp))


def theta_ball(t, precision_bits: int = 192) -> Enclosure:
    """Rigorous enclosure of theta(t) for t >= 2.

    Accepts an int, float, decimal string, mpfr, or Enclosure; an input
    enclosure's radius propagates through the whole computation, so the
    result contains theta of every height in the input interval.
    """
    p = precision_bits
    ctx = context(p)
    tm, tr = _tball(t, p)
    return _wrap(p, theta_raw(ctx, p, tm, tr))


def theta_deriv_ball(t, precision_bits: int = 192) -> Enclosure:
    """Rigorous enclosure of theta'(t) = Re psi(1/4 + it/2)/2 - log(pi)/2."""
    p = precision_bits
    ctx = context(p)
    tm, tr = _tball(t, p)
    bm = ctx.div(tm, 2)
    br = tr * 0.5 * (1.0 + 2.0 ** -50)

    rp = _re_digamma(ctx, p, bm, br)
    pim, pir = _const_ball(ctx, p, "pi")
    lp = b_log(ctx, p, pim, pir)
    out = b_div_int(ctx, p, *b_sub(ctx, p, *rp, *lp), 2)
    return _wrap(p, out)


# ----------------------------------------------------------------------
# fast float64 versions (search seeds only; never used for certification)
# ----------------------------------------------------------------------

_TWO_PI = 2.0 * math.pi


def theta_f64(t: float) -> float:
    """theta(t) in doubles via the asymptotic expansion; good to ~1e-10
    absolute for t >= 10 (first omitted term 127/(430080 t^7))."""
    lt = math.log(t / _TWO_PI)
    t2 = t * t
    return (0.5 * t * (lt - 1.0) - math.pi / 8.0
            + 1.0 / (48.0 * t) + 7.0 / (5760.0 * t * t2)
            + 31.0 / (80640.0 * t2 * t2 * t))


def theta_deriv_f64(t: float) -> float:
    """theta'(t) in doubles, same expansion differentiated."""
    t2 = t * t
    return (0.5 * math.log(t / _TWO_PI) - 1.0 / (48.0 * t2)
            - 7.0 / (1920.0 * t2 * t2) - 31.0 / (16128.0 * t2 * t2 * t2))


# ----------------------------------------------------------------------
# Gram points
# ----------------------------------------------------------------------

def gram_point(k: int, precision_bits: int = 192) -> Enclosure:
    """Enclosure of the k-th Gram point g_k (theta(g_k) = k pi), k >= -1.

    theta is strictly increasing for t >= 7 (theta'(t) ~ log(t/2pi)/2 with
    O(1/t^2) corrections, positive there), and g_{-1} ~ 9.667 > 7, so the
    root is unique.  A double-precision solve seeds the midpoint; the
    enclosure is then certified by rigorous sign changes of
    theta(m +/- delta) - k pi.
    """
    if k < -1:
        raise DomainError(f"Gram index must be >= -1, got {k}")
    p = precision_bits
    ctx = context(p)
    kpi = b_mul_int(ctx, p, *_const_ball(ctx, p, "pi"), k)

    target = k * math.pi
    lo, hi = 7.0, 16.0
    while theta_f64(hi) < target:
        hi *= 1.5
    for _ in range(40):
        mid = 0.5 * (lo + hi)
        if theta_f64(mid) < target:
            lo = mid
        else:
            hi = mid
    m = 0.5 * (lo + hi)
    for _ in range(4):  # Newton polish
        m -= (theta_f64(m) - target) / theta_deriv_f64(m)

    delta = max(1e-12, abs(m) * 1e-14)
    for _ in range(8):
        left = b_sub(ctx, p, *_tb(theta_ball(m - delta, p)), *kpi)
        right = b_sub(ctx, p, *_tb(theta_ball(m + delta, p)), *kpi)
        if _sign(left) < 0 and _sign(right) > 0:
            return _wrap(p, (mpfr(m, p), delta * (1.0 + 2.0 ** -50)))
        delta *= 16.0
    raise RefinementError(f"could not certify Gram point g_{k}",
                          t_lo=m - delta, t_hi=m + delta)


def _tb(e: Enclosure):
    return e.midpoint, float(e.radius)


def _sign(ball) -> int:
    m, r = ball
    if abs(float(m)) / (1.0 + 2.0 ** -50) - r <= 0.0:
        return 0
    return 1 if m > 0 else -1
