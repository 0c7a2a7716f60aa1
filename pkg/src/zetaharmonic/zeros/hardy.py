"""Rigorous enclosures of the Hardy function Z(t) on the critical line.

Z(t) = e^{i theta(t)} zeta(1/2 + it) is real-valued for real t and has the
same zeros as zeta on the critical line; every zero certification in this
package reduces to rigorously signed values of Z.  Two independent
evaluation paths are implemented, both in outward-rounded ball arithmetic:

Euler-Maclaurin (any height t >= 2):

    zeta(s) = sum_{n<N} n^{-s} + N^{-s}/2 + N^{1-s}/(s-1)
              + sum_{k=1}^{K} B_{2k}/(2k)! N^{1-s-2k} prod_{j=0}^{2k-2}(s+j)
              + R_K,
    |R_K| <= |T_{K+1}| |s + 2K + 1| / (sigma + 2K + 1),

with s = 1/2 + it.  The remainder bound is Backlund's (1918; see Edwards,
"Riemann's Zeta Function", sec. 6.4) and holds whenever sigma + 2K + 1 > 0,
with no constraint tying N to t.  Choosing N >= (t + 2K)/pi keeps successive
term ratios below ~1/4, so K ~ precision/2 terms always reach the target.

Riemann-Siegel (t >= 7000):

    Z(t) = 2 sum_{n<=m} cos(theta(t) - t log n)/sqrt(n)
           + (-1)^{m+1} tau^{1/4} sum_{j=0}^{4} C_j(z) tau^{j/2} + R,
    tau = 2 pi / t,  m = floor(sqrt(t/2pi)),  z = 1 - 2 frac(sqrt(t/2pi)),

with the order-4 tail bound |R| <= 0.034 t^{-11/4}.  Gabcke's dissertation
(1979) proves ~0.017 t^{-11/4} for t >= 200; we freeze twice that constant
and validate the combined formula against independent 40-digit reference
values in the test suite.  When floor(sqrt(t/2pi)) cannot be decided at the
working precision, or the coefficient jets lose too much precision near the
removable singularities z = +/-1/2, evaluation falls back to
Euler-Maclaurin, which is always available (just slower).

The crossover RS_MIN_T = 7000 is where the Riemann-Siegel tail bound drops
below ~1e-12, small enough for picometre-scale zero certification.
"""

from __future__ import annotations

import math
from fractions import Fraction

from gmpy2 import mpfr

from ..enclosure import (
    _FUDGE,
    _TINY,
    Enclosure,
    _const_ball,
    _wrap,
    b_abs_lower,
    b_abs_upper,
    b_add,
    b_cos,
    b_div,
    b_div_int,
    b_from_fraction,
    b_from_int,
    b_mul,
    b_mul_int,
    b_sin,
    b_sqrt,
    b_sub,
    context,
    require_precision,
    ulp,
)
from ..errors import DomainError, InsufficientPrecisionError
from ._cball import c_abs_upper, c_add, c_inv, c_mul, c_mul_real
from .bernoulli import bernoulli
from .rs_coeffs import _rs_cj_raw
from .theta import _tball, theta_raw

__all__ = ["hardy_z", "RS_MIN_T"]

# Heights above this use the Riemann-Siegel formula; below, Euler-Maclaurin.
RS_MIN_T = 7000.0
# Tail bound constant for the order-4 Riemann-Siegel correction, t >= 200.
_RS_TAIL_C = 0.034
_RS_TAIL_EXP = -2.75
_RS_GABCKE_MIN_T = 200.0

_HAS_FMS = hasattr(context(64), "fms")
_HAS_RECSQRT = hasattr(context(64), "rec_sqrt")
_HAS_SINCOS = hasattr(context(64), "sin_cos")

# per-precision parallel rows for n = 1..N: ln n and n^{-1/2} balls plus
# float upper bounds used by the fused main-sum loops
_TERM_CACHE: dict = {}
# per-(precision, k) balls for B_{2k}/(2k)!
_EM_COEF_CACHE: dict = {}


def _ensure_terms(p: int, n_max: int):
    rows = _TERM_CACHE.get(p)
    if rows is None:
        rows = ([None], [None], [None], [None], [None], [None])
        _TERM_CACHE[p] = rows
    ln_m, ln_r, ln_hi, rs_m, rs_r, rs_hi = rows
    ctx = context(p)
    for n in range(len(ln_m), n_max + 1):
        x = mpfr(n)
        if n == 1:
            lm, lr = mpfr(0, p), 0.0
            rm, rr = mpfr(1, p), 0.0
        else:
            lm = ctx.log(x)
            lr = ulp(lm, p)
            if _HAS_RECSQRT:
                rm = ctx.rec_sqrt(x)
                rr = ulp(rm, p)
            else:
                rm = ctx.div(1, ctx.sqrt(x))
                rr = 2.0 * ulp(rm, p)
        ln_m.append(lm)
        ln_r.append(lr)
        ln_hi.append(abs(float(lm)) * _FUDGE + lr)
        rs_m.append(rm)
        rs_r.append(rr)
        rs_hi.append(abs(float(rm)) * _FUDGE + rr)
    return rows


def _em_coef(ctx, p: int, k: int):
    """Ball for B_{2k+2} / (B_{2k} (2k+1)(2k+2)): the coefficient ratio of
    consecutive Euler-Maclaurin tail terms (bounded, unlike B_{2k} itself)."""
    got = _EM_COEF_CACHE.get((p, k))
    if got is None:
        q = Fraction(bernoulli(2 * k + 2),
                     bernoulli(2 * k) * (2 * k + 1) * (2 * k + 2))
        got = b_from_fraction(ctx, p, q)
        _EM_COEF_CACHE[(p, k)] = got
    return got


def _em_zeta_raw(ctx, p: int, tm, tr):
    """Complex ball (re_m, re_r, im_m, im_r) for zeta(1/2 + it)."""
    t_hi = abs(float(tm)) * _FUDGE + tr
    k_cap = p // 2 + 12
    n_main = max(8, int((t_hi + 2.0 * k_cap) / math.pi) + 1)
    ln_m, ln_r, ln_hi, rs_m, rs_r, rs_hi = _ensure_terms(p, n_main)

    mul, fma = ctx.mul, ctx.fma
    u_trig = math.ldexp(1.0, 1 - p)
    ang_c = tr * _FUDGE + t_hi * u_trig  # covers t-radius and mul rounding
    re_acc, im_acc = mpfr(1, p), mpfr(0, p)  # n = 1 term is exactly 1
    rad = 0.0
    if _HAS_SINCOS:
        sin_cos = ctx.sin_cos
        for n in range(2, n_main):
            am = mul(tm, ln_m[n])
            cr = ang_c * ln_hi[n] + t_hi * ln_r[n] + u_trig
            sv, cv = sin_cos(am)
            re_acc = fma(rs_m[n], cv, re_acc)
            im_acc = fma(rs_m[n], sv, im_acc)
            rad += rs_hi[n] * cr + rs_r[n]
    else:
        cos, sin = ctx.cos, ctx.sin
        for n in range(2, n_main):
            am = mul(tm, ln_m[n])
            cr = ang_c * ln_hi[n] + t_hi * ln_r[n] + u_trig
            re_acc = fma(rs_m[n], cos(am), re_acc)
            im_acc = fma(rs_m[n], sin(am), im_acc)
            rad += rs_hi[n] * cr + rs_r[n]
    # one fma rounding per term per component, |acc| < 2 sqrt(N) + 2
    pad = n_main * ulp(mpfr(2.0 * math.sqrt(n_main) + 2.0), p)
    rad = (rad + pad) * _FUDGE
    # Im of the main sum carries a minus sign: n^{-it} = cis(-t log n)
    zeta = (re_acc, rad, ctx.minus(im_acc), rad)

    N = n_main
    aN = b_mul(ctx, p, tm, tr, ln_m[N], ln_r[N])
    cN = b_cos(ctx, p, *aN)
    sN = b_sin(ctx, p, *aN)
    cis_n = (cN[0], cN[1], ctx.minus(sN[0]), sN[1])  # e^{-i t log N}
    sq_n = b_sqrt(ctx, p, *b_from_int(ctx, p, N))

    # N^{-s}/2
    n_pow_ms = c_mul_real(ctx, p, cis_n, rs_m[N], rs_r[N])
    zeta = c_add(ctx, p, zeta, c_mul_real(ctx, p, n_pow_ms, mpfr(0.5), 0.0))
    # N^{1-s}/(s-1)
    s_minus_1 = (mpfr(-0.5, p), 0.0, tm, tr * _FUDGE)
    integral = c_mul(ctx, p, c_mul_real(ctx, p, cis_n, *sq_n),
                     c_inv(ctx, p, s_minus_1))
    zeta = c_add(ctx, p, zeta, integral)

    target = math.ldexp(max(1.0, t_hi) ** 0.25, 4 - p)
    # T_1 = (B_2/2!) s N^{-s-1}; later terms by the ratio recurrence
    # T_{k+1} = T_k * [B_{2k+2}/(B_{2k}(2k+1)(2k+2))] (s+2k-1)(s+2k)/N^2,
    # which keeps every intermediate at the term's own (small) magnitude.
    s = (mpfr(0.5, p), 0.0, tm, tr * _FUDGE)
    nfac = b_div_int(ctx, p, *sq_n, N * N)  # N^{1/2 - 2}
    b2 = b_from_fraction(ctx, p, Fraction(bernoulli(2), 2))
    term = c_mul_real(ctx, p, c_mul(ctx, p, cis_n, s),
                      *b_mul(ctx, p, *b2, *nfac))
    prev_bound = math.inf
    k = 1
    while True:
        # Backlund: stopping before adding term k leaves remainder
        # |R_{k-1}| <= |T_k| |s + 2k - 1| / (sigma + 2k - 1), sigma = 1/2
        sig = 2.0 * k - 0.5
        bound = c_abs_upper(term) * math.hypot(sig, t_hi) * _FUDGE / sig
        if bound <= target or bound >= prev_bound or k >= k_cap:
            rem = bound
            break
        zeta = c_add(ctx, p, zeta, term)
        prev_bound = bound
        f1 = (ctx.add(mpfr(0.5, p), 2 * k - 1), 0.0, tm, tr * _FUDGE)
        f2 = (ctx.add(mpfr(0.5, p), 2 * k), 0.0, tm, tr * _FUDGE)
        term = c_mul(ctx, p, c_mul(ctx, p, term, f1), f2)
        term = c_mul_real(ctx, p, term, *_em_coef(ctx, p, k))
        term = (*b_div_int(ctx, p, term[0], term[1], N * N),
                *b_div_int(ctx, p, term[2], term[3], N * N))
        k += 1
    return (zeta[0], (zeta[1] + rem) * _FUDGE,
            zeta[2], (zeta[3] + rem) * _FUDGE)


def _em_z_raw(ctx, p: int, tm, tr):
    """Z(t) ball by Euler-Maclaurin: rotate zeta(1/2+it) by e^{i theta}."""
    zre_m, zre_r, zim_m, zim_r = _em_zeta_raw(ctx, p, tm, tr)
    th = theta_raw(ctx, p, tm, tr)
    c = b_cos(ctx, p, *th)
    s = b_sin(ctx, p, *th)
    return b_sub(ctx, p, *b_mul(ctx, p, *c, zre_m, zre_r),
                 *b_mul(ctx, p, *s, zim_m, zim_r))


def _rs_z_raw(ctx, p: int, tm, tr):
    """Z(t) ball by the Riemann-Siegel formula, or None when the formula
    cannot be applied soundly at this precision (caller falls back)."""
    t_lo = b_abs_lower(tm, tr)
    t_hi = abs(float(tm)) * _FUDGE + tr
    if t_lo < _RS_GABCKE_MIN_T:
        return None

    two_pi = _const_ball(ctx, p, "two_pi")
    x = b_sqrt(ctx, p, *b_div(ctx, p, tm, tr, *two_pi))
    m_i = int(b_abs_lower(*x))
    if m_i < 1 or int(b_abs_upper(*x)) != m_i:
        return None  # floor(sqrt(t/2pi)) straddles an integer
    phat = b_sub(ctx, p, x[0], x[1], mpfr(m_i), 0.0)
    z = b_sub(ctx, p, mpfr(1, p), 0.0, *b_mul_int(ctx, p, *phat, 2))
    try:
        cj = _rs_cj_raw(ctx, p, *z)
    except DomainError:
        return None  # cos(pi z) straddles 0: z is pinned at +/-1/2

    tau = b_div(ctx, p, *two_pi, tm, tr)
    y = b_sqrt(ctx, p, *tau)  # tau^{1/2}
    f = b_sqrt(ctx, p, *y)  # tau^{1/4}
    corr = cj[4]
    for j in (3, 2, 1, 0):
        corr = b_add(ctx, p, *b_mul(ctx, p, *corr, *y), *cj[j])
    fc = b_mul(ctx, p, *f, *corr)

    ln_m, ln_r, ln_hi, rs_m, rs_r, rs_hi = _ensure_terms(p, max(m_i, 1))
    thm, thr = theta_raw(ctx, p, tm, tr)
    cos, fma = ctx.cos, ctx.fma
    u_trig = math.ldexp(1.0, 1 - p)
    th_hi = abs(float(thm)) * _FUDGE + thr
    # fms rounding: |t log n - theta| <= t_hi log m + theta
    u_arg = (t_hi * ln_hi[m_i] + th_hi + 1.0) * u_trig
    ang_c = tr * _FUDGE + t_hi * u_trig
    base_r = thr * _FUDGE + u_arg + u_trig
    acc = mpfr(0, p)
    rad = 0.0
    if _HAS_FMS:
        fms = ctx.fms
        for n in range(1, m_i + 1):
            am = fms(tm, ln_m[n], thm)  # cos is even: cos(t ln n - theta)
            cr = ang_c * ln_hi[n] + t_hi * ln_r[n] + base_r
            acc = fma(rs_m[n], cos(am), acc)
            rad += rs_hi[n] * cr + rs_r[n]
    else:
        mul, sub = ctx.mul, ctx.sub
        for n in range(1, m_i + 1):
            am = sub(mul(tm, ln_m[n]), thm)
            cr = ang_c * ln_hi[n] + t_hi * ln_r[n] + base_r + u_arg
            acc = fma(rs_m[n], cos(am), acc)
            rad += rs_hi[n] * cr + rs_r[n]
    pad = m_i * ulp(mpfr(2.0 * math.sqrt(m_i) + 2.0), p)
    main = b_mul_int(ctx, p, acc, (rad + pad) * _FUDGE, 2)

    if m_i % 2 == 1:
        out = b_add(ctx, p, *main, *fc)
    else:
        out = b_sub(ctx, p, *main, *fc)
    tail = _RS_TAIL_C * t_lo ** _RS_TAIL_EXP
    return (out[0], (out[1] + tail) * _FUDGE + _TINY)


def _z_scale(tm, tr) -> float:
    """Natural size of Z's main sum, ~ 2 (t/2pi)^{1/4}; radius yardstick."""
    t_hi = abs(float(tm)) * _FUDGE + tr
    return max(1.0, 2.2 * (t_hi / (2.0 * math.pi)) ** 0.25)


def _rs_tail_floor(tm, tr) -> float:
    t_lo = b_abs_lower(tm, tr)
    if t_lo < _RS_GABCKE_MIN_T:
        return math.inf
    return _RS_TAIL_C * t_lo ** _RS_TAIL_EXP


def _z_raw(ctx, p: int, tm, tr, method: str):
    """Z(t) ball; 'em' always succeeds, 'rs' returns None when unusable
    (straddled m, or z pinned at +/-1/2).  Callers own the routing."""
    if method == "em":
        return _em_z_raw(ctx, p, tm, tr)
    if method == "rs":
        return _rs_z_raw(ctx, p, tm, tr)
    raise ValueError(f"unknown method {method!r}")


def hardy_z(t, precision_bits: int = 192) -> Enclosure:
    """Rigorous enclosure of Z(t) for t >= 2.

    Accepts int, float, decimal string, mpfr, or Enclosure heights; an input
    enclosure's radius propagates, so the result encloses Z over the whole
    input interval.  Above the crossover the Riemann-Siegel path is tried at
    the requested precision and, if the coefficient jets lose too much near
    their removable singularities, retried with extra working bits before
    conceding to Euler-Maclaurin.  Raises DomainError for t < 2 and
    InsufficientPrecisionError when precision_bits is too small to bound the
    series remainders usefully.
    """
    p = precision_bits
    require_precision(p, 24, "hardy_z")
    ctx = context(p)
    tm, tr = _tball(t, p)
    scale = _z_scale(tm, tr)
    out = None
    if abs(float(tm)) - tr >= RS_MIN_T:
        # RS radius cannot beat the Gabcke tail; only jet noise above that
        # floor justifies escalating or falling back.
        accept = max(4.0 * _rs_tail_floor(tm, tr),
                     scale * math.ldexp(1.0, 26 - p))
        for pw in (p, p + 64, p + 128):
            ctxw = context(pw)
            tmw, trw = _tball(t, pw)
            got = _rs_z_raw(ctxw, pw, tmw, trw)
            if got is not None and got[1] <= accept:
                p, out = pw, got
                break
    if out is None:
        out = _em_z_raw(ctx, p, tm, tr)
    if out[1] > scale and tr <= scale * 2.0 ** -8:
        raise InsufficientPrecisionError(
            f"Z({t}) enclosure radius {out[1]:.3g} exceeds the natural scale "
            f"{scale:.3g}; increase precision_bits (got {precision_bits})")
    return _wrap(p, out)
