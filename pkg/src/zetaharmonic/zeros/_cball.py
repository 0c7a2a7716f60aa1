"""Minimal complex ball arithmetic for the theta and zeta kernels.

A complex ball is the 4-tuple (re_mid, re_rad, im_mid, im_rad): a rectangle
[re_mid +/- re_rad] x [im_mid +/- im_rad] guaranteed to contain the exact
complex value.  Only the handful of operations the Stirling series and the
Euler-Maclaurin tail need are provided; everything routes through the
audited real-ball kernels in ``enclosure``.
"""

from __future__ import annotations

from ..enclosure import b_add, b_div, b_mul, b_sqr, b_sub


def c_from_real(m, r):
    from gmpy2 import mpfr
    return (m, r, mpfr(0), 0.0)


def c_add(ctx, p, a, b):
    rm, rr = b_add(ctx, p, a[0], a[1], b[0], b[1])
    im, ir = b_add(ctx, p, a[2], a[3], b[2], b[3])
    return (rm, rr, im, ir)


def c_sub(ctx, p, a, b):
    rm, rr = b_sub(ctx, p, a[0], a[1], b[0], b[1])
    im, ir = b_sub(ctx, p, a[2], a[3], b[2], b[3])
    return (rm, rr, im, ir)


def c_mul(ctx, p, a, b):
    ac = b_mul(ctx, p, a[0], a[1], b[0], b[1])
    bd = b_mul(ctx, p, a[2], a[3], b[2], b[3])
    ad = b_mul(ctx, p, a[0], a[1], b[2], b[3])
    bc = b_mul(ctx, p, a[2], a[3], b[0], b[1])
    rm, rr = b_sub(ctx, p, ac[0], ac[1], bd[0], bd[1])
    im, ir = b_add(ctx, p, ad[0], ad[1], bc[0], bc[1])
    return (rm, rr, im, ir)


def c_mul_real(ctx, p, a, m, r):
    rm, rr = b_mul(ctx, p, a[0], a[1], m, r)
    im, ir = b_mul(ctx, p, a[2], a[3], m, r)
    return (rm, rr, im, ir)


def c_norm2(ctx, p, a):
    """Ball for |a|^2 = re^2 + im^2."""
    r2 = b_sqr(ctx, p, a[0], a[1])
    i2 = b_sqr(ctx, p, a[2], a[3])
    return b_add(ctx, p, r2[0], r2[1], i2[0], i2[1])


def c_inv(ctx, p, a):
    """1 / a; DomainError (via b_div) if |a|^2 cannot be bounded away from 0."""
    nm, nr = c_norm2(ctx, p, a)
    rm, rr = b_div(ctx, p, a[0], a[1], nm, nr)
    im, ir = b_div(ctx, p, a[2], a[3], nm, nr)
    return (rm, rr, ctx.minus(im), ir)  # ctx.minus: exact full-precision negate


def c_abs_upper(a) -> float:
    """Double upper bound for |a| over the ball."""
    from math import hypot
    hi_re = abs(float(a[0])) * (1.0 + 2.0 ** -50) + a[1]
    hi_im = abs(float(a[2])) * (1.0 + 2.0 ** -50) + a[3]
    return hypot(hi_re, hi_im) * (1.0 + 2.0 ** -50)
