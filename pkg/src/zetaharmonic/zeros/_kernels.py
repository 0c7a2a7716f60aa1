"""Fast float64 kernels for scanning: theta and Z(t) in doubles.

These are used exclusively to *seed* zero searches (bracketing sign changes,
Gram-block bookkeeping).  Nothing rigorous is ever concluded from them: every
bracket they propose is re-verified with the ball-arithmetic evaluators in
``hardy`` before any zero is accepted.  Accuracy is roughly 1e-12 relative
at moderate heights, degrading gracefully; double rounding at t ~ 1e5 means
ordinates themselves can only be seeded to ~1e-11 here.

The Riemann-Siegel path mirrors the rigorous implementation (same jet
recurrences, same coefficient combinations); near the removable
singularities z ~ +/-1/2 of the quotient jets, or below t = 500 where the
tail bound is weak, it switches to Euler-Maclaurin with Backlund's stopping
rule.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

from .bernoulli import bernoulli

__all__ = ["theta64", "z64", "z64_batch"]

# B_{2k}/(2k)! for the Euler-Maclaurin tail, k = 0..20
_B2K = np.array(
    [float(bernoulli(2 * k)) / math.factorial(2 * k) for k in range(21)],
    dtype=np.float64,
)

_TWO_PI = 2.0 * math.pi


@njit(cache=True)
def theta64(t):
    """Asymptotic theta(t); ~1e-10 absolute for t >= 10."""
    lt = math.log(t / _TWO_PI)
    t2 = t * t
    return (0.5 * t * (lt - 1.0) - math.pi / 8.0 + 1.0 / (48.0 * t)
            + 7.0 / (5760.0 * t * t2) + 31.0 / (80640.0 * t * t2 * t2))


@njit(cache=True)
def _z_em64(t):
    """Z(t) by Euler-Maclaurin in doubles (any t >= 2)."""
    k_cap = 20
    n_main = max(8, int((t + 2.0 * k_cap) / math.pi) + 1)
    s = complex(0.5, t)
    acc = complex(1.0, 0.0)  # n = 1
    for n in range(2, n_main):
        ln = math.log(n)
        rs = 1.0 / math.sqrt(n)
        acc += complex(rs * math.cos(t * ln), -rs * math.sin(t * ln))
    ln_n = math.log(n_main)
    cis_n = complex(math.cos(t * ln_n), -math.sin(t * ln_n))
    sq_n = math.sqrt(n_main)
    acc += 0.5 * cis_n / sq_n
    acc += sq_n * cis_n / (s - 1.0)
    prod = s
    nfac = sq_n / (n_main * n_main)
    for k in range(1, k_cap + 1):
        term = _B2K[k] * nfac * cis_n * prod
        # Backlund remainder factor |s+2k-1|/(2k-1/2)
        if abs(term) * (1.0 + t / (2.0 * k - 0.5)) < 1e-17:
            break
        acc += term
        prod = prod * (s + (2.0 * k - 1.0)) * (s + 2.0 * k)
        nfac /= float(n_main) * n_main
    th = theta64(t)
    return math.cos(th) * acc.real - math.sin(th) * acc.imag


@njit(cache=True)
def _z_rs64(t):
    """Z(t) by Riemann-Siegel in doubles; caller guarantees t >= 500 and
    z = 1 - 2 frac(sqrt(t/2pi)) away from +/-1/2."""
    a = math.sqrt(t / _TWO_PI)
    m = int(a)
    z = 1.0 - 2.0 * (a - m)
    th = theta64(t)
    acc = 0.0
    for n in range(1, m + 1):
        acc += math.cos(th - t * math.log(n)) / math.sqrt(n)

    # quotient jets of Psi(z) = cos(pi(z^2/2 + 3/8))/cos(pi z), order 12
    c = np.zeros(13)
    sn = np.zeros(13)
    d = np.zeros(13)
    sd = np.zeros(13)
    q = np.zeros(13)
    u0 = math.pi * (0.5 * z * z + 0.375)
    u1 = math.pi * z
    c[0] = math.cos(u0)
    sn[0] = math.sin(u0)
    for n in range(1, 13):
        hi = math.pi * sn[n - 2] if n >= 2 else 0.0
        c[n] = -(u1 * sn[n - 1] + hi) / n
        hi = math.pi * c[n - 2] if n >= 2 else 0.0
        sn[n] = (u1 * c[n - 1] + hi) / n
    d[0] = math.cos(u1)
    sd[0] = math.sin(u1)
    for n in range(1, 13):
        d[n] = -math.pi * sd[n - 1] / n
        sd[n] = math.pi * d[n - 1] / n
    for n in range(13):
        num = c[n]
        for j in range(1, n + 1):
            num -= d[j] * q[n - j]
        q[n] = num / d[0]

    pi2 = math.pi * math.pi
    pi4 = pi2 * pi2
    pi6 = pi4 * pi2
    pi8 = pi4 * pi4
    d0 = q[0]
    d1 = q[1]
    d2 = 2.0 * q[2]
    d3 = 6.0 * q[3]
    d4 = 24.0 * q[4]
    d5 = 120.0 * q[5]
    d6 = 720.0 * q[6]
    d8 = 40320.0 * q[8]
    d9 = 362880.0 * q[9]
    d12 = 479001600.0 * q[12]
    c0 = d0
    c1 = d3 / (12.0 * pi2)
    c2 = d2 / (16.0 * pi2) + d6 / (288.0 * pi4)
    c3 = d1 / (32.0 * pi2) + d5 / (120.0 * pi4) + d9 / (10368.0 * pi6)
    c4 = (d0 / (128.0 * pi2) + 19.0 * d4 / (1536.0 * pi4)
          + 11.0 * d8 / (23040.0 * pi6) + d12 / (497664.0 * pi8))

    tau = _TWO_PI / t
    y = math.sqrt(tau)
    corr = (((c4 * y + c3) * y + c2) * y + c1) * y + c0
    sign = 1.0 if m % 2 == 1 else -1.0
    return 2.0 * acc + sign * tau ** 0.25 * corr


@njit(cache=True)
def z64(t):
    """Z(t) in doubles; routes RS/EM like the rigorous evaluator."""
    if t < 500.0:
        return _z_em64(t)
    a = math.sqrt(t / _TWO_PI)
    z = 1.0 - 2.0 * (a - int(a))
    if abs(abs(z) - 0.5) < 0.05:
        return _z_em64(t)
    return _z_rs64(t)


@njit(cache=True)
def z64_batch(ts):
    out = np.empty(ts.shape[0])
    for i in range(ts.shape[0]):
        out[i] = z64(ts[i])
    return out
