"""Self-validating midpoint-radius arithmetic on MPFR numbers.

An Enclosure is an interval [midpoint - radius, midpoint + radius] that is
guaranteed to contain the exact real value of the computation it came from.
Midpoints are gmpy2.mpfr values at an explicit working precision; MPFR
rounds every operation correctly (error <= 0.5 ulp), and the radius update
for each operation adds a full ulp on top of the propagated input radii, so
containment never leaks.  Radii are accumulated in double precision as
upper bounds: every radius expression is inflated by _FUDGE = 1 + 2^-50
(covering the 2^-53 relative error of each double operation several times
over) plus one subnormal _TINY (absorbing underflow), and magnitudes of
midpoints are converted with the same outward slack.

There is no global state: each precision gets its own cached gmpy2 context
and all operations are pure functions of their inputs, so enclosures are
safe to use from any number of threads or processes.

The low-level functions here work on raw (mpfr, float) pairs for speed; the
public Enclosure dataclass and enc_apply/enc_const wrap them with
validation.  Only the operations the rest of the package needs are
implemented; this is not a general interval library.
"""

from __future__ import annotations

import decimal
import math
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction

import gmpy2
from gmpy2 import mpfr

from .errors import DomainError, InsufficientPrecisionError

__all__ = [
    "Enclosure",
    "enc_apply",
    "enc_const",
    "enc_from",
    "to_display",
    "OPS",
    "CONSTANTS",
]

# outward slack for radius arithmetic done in doubles
_FUDGE = 1.0 + 2.0 ** -50
_TINY = 5e-324

_MIN_PRECISION = 16

_CTX_CACHE: dict[int, "gmpy2.context"] = {}


def context(precision_bits: int):
    """Cached round-to-nearest context for the given precision."""
    ctx = _CTX_CACHE.get(precision_bits)
    if ctx is None:
        if precision_bits < _MIN_PRECISION:
            raise DomainError(
                f"precision_bits must be >= {_MIN_PRECISION}, got {precision_bits}")
        ctx = gmpy2.context(precision=precision_bits)
        _CTX_CACHE[precision_bits] = ctx
    return ctx


def ulp(m: mpfr, precision_bits: int) -> float:
    """An upper bound for one unit in the last place of m, as a double."""
    e = gmpy2.get_exp(m)  # 0.5 <= |m| / 2^e < 1 for nonzero m; 0 for m == 0
    return 2.0 ** min(max(e - precision_bits, -1074), 1023)


def _mag(m: mpfr) -> float:
    """Upper bound for |m| as a double."""
    return abs(float(m)) * _FUDGE


# ----------------------------------------------------------------------
# raw ball kernels: (midpoint, radius) -> (midpoint, radius)
# ----------------------------------------------------------------------

def b_add(ctx, p, ma, ra, mb, rb):
    m = ctx.add(ma, mb)
    return m, (ra + rb + ulp(m, p)) * _FUDGE + _TINY


def b_sub(ctx, p, ma, ra, mb, rb):
    m = ctx.sub(ma, mb)
    return m, (ra + rb + ulp(m, p)) * _FUDGE + _TINY


def b_mul(ctx, p, ma, ra, mb, rb):
    m = ctx.mul(ma, mb)
    r = (_mag(ma) * rb + _mag(mb) * ra + ra * rb + ulp(m, p)) * _FUDGE + _TINY
    return m, r


def b_div(ctx, p, ma, ra, mb, rb):
    blo = abs(float(mb)) / _FUDGE - rb  # lower bound for |b| over the enclosure
    if blo <= 0.0 or not math.isfinite(blo):
        raise DomainError("division by an enclosure that straddles zero")
    m = ctx.div(ma, mb)
    r = ((ra + _mag(m) * rb) / blo + ulp(m, p)) * _FUDGE + _TINY
    return m, r


def b_log(ctx, p, ma, ra):
    lo = float(ma) / _FUDGE - ra  # lower bound of the argument interval
    if ma <= 0 or lo <= 0.0:
        raise DomainError("log of an enclosure that is not strictly positive")
    m = ctx.log(ma)
    return m, (ra / lo + ulp(m, p)) * _FUDGE + _TINY


def b_exp(ctx, p, ma, ra):
    m = ctx.exp(ma)
    grow = math.expm1(ra) if ra < 700.0 else math.inf
    return m, (_mag(m) * grow + ulp(m, p)) * _FUDGE + _TINY


def b_sqr(ctx, p, ma, ra):
    m = ctx.square(ma)
    r = (2.0 * _mag(ma) * ra + ra * ra + ulp(m, p)) * _FUDGE + _TINY
    return m, r


def b_sqrt(ctx, p, ma, ra):
    lo = float(ma) / _FUDGE - ra
    if ma < 0 or lo <= 0.0:
        raise DomainError("sqrt of an enclosure that is not strictly positive")
    m = ctx.sqrt(ma)
    r = (ra / (2.0 * math.sqrt(lo) / _FUDGE) + ulp(m, p)) * _FUDGE + _TINY
    return m, r


def b_cos(ctx, p, ma, ra):
    m = ctx.cos(ma)
    return m, (ra + ulp(m, p)) * _FUDGE + _TINY  # |cos'| <= 1


def b_sin(ctx, p, ma, ra):
    m = ctx.sin(ma)
    return m, (ra + ulp(m, p)) * _FUDGE + _TINY


def b_atan(ctx, p, ma, ra):
    m = ctx.atan(ma)
    return m, (ra + ulp(m, p)) * _FUDGE + _TINY


def b_atan2(ctx, p, my, ry, mx, rx):
    # both partials of atan2(y, x) are bounded by 1 / max(|x|, |y|)
    big = max(abs(float(mx)) / _FUDGE - rx, abs(float(my)) / _FUDGE - ry)
    if big <= 0.0:
        raise DomainError("atan2 of an enclosure pair containing the origin")
    m = ctx.atan2(my, mx)
    return m, ((rx + ry) / big + ulp(m, p)) * _FUDGE + _TINY


def b_neg(ctx, m, r):
    # NB: Python's unary minus on an mpfr rounds through the thread-default
    # 53-bit context; ctx.minus is exact at full precision.
    return ctx.minus(m), r


def b_mul_int(ctx, p, ma, ra, n: int):
    m = ctx.mul(ma, n)
    return m, (abs(n) * ra + ulp(m, p)) * _FUDGE + _TINY


def b_div_int(ctx, p, ma, ra, n: int):
    if n == 0:
        raise DomainError("division by zero")
    m = ctx.div(ma, n)
    return m, (ra / abs(n) + ulp(m, p)) * _FUDGE + _TINY


def b_pow_int(ctx, p, ma, ra, n: int):
    """Integer power, n >= 0, by binary powering of balls."""
    if n < 0:
        raise DomainError("b_pow_int expects n >= 0")
    m, r = mpfr(1, p), 0.0
    bm, br = ma, ra
    while n:
        if n & 1:
            m, r = b_mul(ctx, p, m, r, bm, br)
        n >>= 1
        if n:
            bm, br = b_sqr(ctx, p, bm, br)
    return m, r


def b_from_int(ctx, p, n: int):
    m = mpfr(n, p)
    r = 0.0 if abs(n).bit_length() <= p else ulp(m, p)
    return m, r


def b_from_fraction(ctx, p, q: Fraction):
    mn, rn = b_from_int(ctx, p, q.numerator)
    md, rd = b_from_int(ctx, p, q.denominator)
    return b_div(ctx, p, mn, rn, md, rd)


def b_from_str(ctx, p, s: str):
    m = mpfr(s, p)
    return m, ulp(m, p)


def b_abs_upper(m, r) -> float:
    """Upper bound of |value| over the ball, as a double."""
    return abs(float(m)) * _FUDGE + r


def b_abs_lower(m, r) -> float:
    """Lower bound of |value| over the ball (0 if the ball straddles 0)."""
    lo = abs(float(m)) / _FUDGE - r
    return lo if lo > 0.0 else 0.0


# ----------------------------------------------------------------------
# public value type
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class Enclosure:
    """A closed interval [midpoint - radius, midpoint + radius] certified to
    contain the exact value.  Immutable; all arithmetic goes through
    enc_apply, which never shrinks containment."""

    midpoint: mpfr
    radius: mpfr
    precision_bits: int

    def __post_init__(self):
        if self.precision_bits < _MIN_PRECISION:
            raise DomainError(
                f"precision_bits must be >= {_MIN_PRECISION}, got {self.precision_bits}")
        if self.radius < 0 or gmpy2.is_nan(self.radius):
            raise DomainError("radius must be a nonnegative real")

    # -- exact endpoint queries (rational arithmetic, no rounding) --------

    def _mid_q(self) -> Fraction:
        return Fraction(gmpy2.mpq(self.midpoint))

    def _rad_q(self) -> Fraction:
        return Fraction(gmpy2.mpq(self.radius))

    def lower_q(self) -> Fraction:
        return self._mid_q() - self._rad_q()

    def upper_q(self) -> Fraction:
        return self._mid_q() + self._rad_q()

    def lower(self) -> float:
        """Double lower bound (rounded outward)."""
        fm = float(self.midpoint)  # within 0.5 ulp of the midpoint
        pad = abs(fm) * 2.0 ** -50 + _TINY
        return fm - pad - float(self.radius) * _FUDGE

    def upper(self) -> float:
        """Double upper bound (rounded outward)."""
        fm = float(self.midpoint)
        pad = abs(fm) * 2.0 ** -50 + _TINY
        return fm + pad + float(self.radius) * _FUDGE

    def contains(self, x) -> bool:
        """Exact containment test for x given as int, Fraction, mpfr, or a
        decimal string; no rounding is involved."""
        if isinstance(x, str):
            xq = _fraction_from_decimal_str(x)
        elif isinstance(x, Fraction):
            xq = x
        elif isinstance(x, int):
            xq = Fraction(x)
        else:
            xq = Fraction(gmpy2.mpq(x))
        return abs(xq - self._mid_q()) <= self._rad_q()

    def is_subset_of(self, other: "Enclosure") -> bool:
        return (other.lower_q() <= self.lower_q()
                and self.upper_q() <= other.upper_q())

    def excludes_zero(self) -> bool:
        return abs(self._mid_q()) > self._rad_q()

    def sign(self) -> int:
        """+1 or -1 when the enclosure has definite sign, else 0."""
        if not self.excludes_zero():
            return 0
        return 1 if self.midpoint > 0 else -1

    def __str__(self):
        return to_display(self, 20)


def _fraction_from_decimal_str(s: str) -> Fraction:
    return Fraction(Decimal(s))


def _wrap(p: int, pair) -> Enclosure:
    m, r = pair
    return Enclosure(m, mpfr(r, 64), p)


def _unwrap(e: Enclosure):
    return e.midpoint, float(e.radius)


def enc_from(value, precision_bits: int = 192, radius: float = None) -> Enclosure:
    """Point (or explicitly padded) enclosure from an int, Fraction, decimal
    string, float, or mpfr.  Ints, floats and mpfr convert exactly when they
    fit in the precision; strings get a one-ulp conversion pad."""
    ctx = context(precision_bits)
    p = precision_bits
    if isinstance(value, int):
        m, r = b_from_int(ctx, p, value)
    elif isinstance(value, Fraction):
        m, r = b_from_fraction(ctx, p, value)
    elif isinstance(value, str):
        m, r = b_from_str(ctx, p, value)
    elif isinstance(value, float):
        m, r = mpfr(value, p), 0.0  # doubles embed exactly for p >= 53
        if p < 53:
            r = ulp(m, p)
    else:  # mpfr input: round to target precision, pad only if inexact
        m = ctx.add(value, mpfr(0))
        r = 0.0 if m == value else ulp(m, p)
    if radius is not None:
        if radius < 0:
            raise DomainError("radius must be nonnegative")
        r = (r + radius) * _FUDGE
    return _wrap(p, (m, r))


# ----------------------------------------------------------------------
# the operation table
# ----------------------------------------------------------------------

_UNARY = {
    "log": b_log,
    "sqr": b_sqr,
    "exp": b_exp,
}

_BINARY = {
    "add": b_add,
    "sub": b_sub,
    "mul": b_mul,
    "div": b_div,
}

OPS = ("add", "sub", "mul", "div", "log", "sqr", "exp")


def enc_apply(op: str, args, precision_bits: int = None) -> Enclosure:
    """Apply one of the supported operations to one or two Enclosures.

    The result's interval contains the exact image of every point of the
    input interval(s).  Domain violations (divisor straddling zero, log of
    a nonpositive interval) raise DomainError rather than returning a wide
    interval.
    """
    if isinstance(args, Enclosure):
        args = (args,)
    args = tuple(args)
    if not all(isinstance(a, Enclosure) for a in args):
        raise TypeError("enc_apply arguments must be Enclosure instances")
    if op in _UNARY:
        if len(args) != 1:
            raise DomainError(f"{op} takes exactly one enclosure")
    elif op in _BINARY:
        if len(args) != 2:
            raise DomainError(f"{op} takes exactly two enclosures")
    else:
        raise DomainError(f"unknown operation {op!r}; valid: {', '.join(OPS)}")
    p = precision_bits or max(a.precision_bits for a in args)
    ctx = context(p)
    if op in _UNARY:
        m, r = _unwrap(args[0])
        return _wrap(p, _UNARY[op](ctx, p, m, r))
    ma, ra = _unwrap(args[0])
    mb, rb = _unwrap(args[1])
    return _wrap(p, _BINARY[op](ctx, p, ma, ra, mb, rb))


# ----------------------------------------------------------------------
# named constants
# ----------------------------------------------------------------------

CONSTANTS = ("pi", "two_pi", "e", "two_pi_e", "log_two_pi")


def _const_ball(ctx, p, name):
    if name == "pi":
        return ctx.const_pi(), ulp(ctx.const_pi(), p)
    if name == "two_pi":
        m, r = _const_ball(ctx, p, "pi")
        return b_mul_int(ctx, p, m, r, 2)
    if name == "e":
        m = ctx.exp(mpfr(1, p))
        return m, ulp(m, p)
    if name == "two_pi_e":
        m2p, r2p = _const_ball(ctx, p, "two_pi")
        me, re_ = _const_ball(ctx, p, "e")
        return b_mul(ctx, p, m2p, r2p, me, re_)
    if name == "log_two_pi":
        m2p, r2p = _const_ball(ctx, p, "two_pi")
        return b_log(ctx, p, m2p, r2p)
    raise DomainError(f"unknown constant {name!r}; valid: {', '.join(CONSTANTS)}")


def enc_const(name: str, precision_bits: int = 192) -> Enclosure:
    """Enclosure of a named constant with radius <= 2 ulp at the requested
    precision.  Derived constants are computed with 16 guard bits and then
    rounded, so the compounding stays under the 2 ulp promise."""
    if precision_bits < _MIN_PRECISION:
        raise DomainError(
            f"precision_bits must be >= {_MIN_PRECISION}, got {precision_bits}")
    p_hi = precision_bits + 16
    ctx_hi = context(p_hi)
    m_hi, r_hi = _const_ball(ctx_hi, p_hi, name)
    ctx = context(precision_bits)
    m = ctx.add(m_hi, mpfr(0))  # correctly rounded: error <= 0.5 ulp
    r = (r_hi + 0.5 * ulp(m, precision_bits)) * _FUDGE
    return _wrap(precision_bits, (m, r))


# ----------------------------------------------------------------------
# decimal rendering
# ----------------------------------------------------------------------

def mpfr_to_decimal(x: mpfr, sig: int, rounding=decimal.ROUND_HALF_EVEN) -> Decimal:
    """Exact-value decimal conversion of an mpfr, rounded once at `sig`
    significant digits with the requested rounding mode."""
    if gmpy2.is_nan(x) or gmpy2.is_infinite(x):
        raise DomainError("cannot render a non-finite midpoint")
    q = gmpy2.mpq(x)  # exact rational value of the mpfr
    with decimal.localcontext() as c:
        c.prec = sig
        c.rounding = rounding
        return Decimal(int(gmpy2.numer(q))) / Decimal(int(gmpy2.denom(q)))


def to_display(enc: Enclosure, sig: int, radius_sig: int = 2) -> str:
    """Render an enclosure as "m ± r": midpoint in round-half-even decimal
    at `sig` significant digits, radius as a decimal upper bound."""
    mid = mpfr_to_decimal(enc.midpoint, sig)
    if enc.radius == 0:
        return f"{mid} ± 0"
    rad = mpfr_to_decimal(enc.radius, radius_sig, rounding=decimal.ROUND_CEILING)
    return f"{mid} ± {rad}"


def require_precision(p: int, minimum: int, what: str):
    if p < minimum:
        raise InsufficientPrecisionError(
            f"{what} needs at least {minimum} bits of working precision, got {p}")
