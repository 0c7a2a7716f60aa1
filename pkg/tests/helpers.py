"""Shared helpers for comparing enclosures against frozen decimal oracles.

Oracle values are decimal strings rounded at generation time (typically 50
significant digits).  An enclosure whose radius is far below the oracle's
own quantization cannot literally contain the rounded string, so the sound
assertion is containment up to the oracle's half-ulp: the true value lies
within [mid - rad, mid + rad] and within [oracle - u/2, oracle + u/2], so
|mid - oracle| <= rad + u/2 must hold (we allow a full ulp of slack).
"""

import json
import pathlib
from decimal import Decimal
from fractions import Fraction

import gmpy2

DATA = pathlib.Path(__file__).parent / "data"


def load(name: str) -> dict:
    return json.loads((DATA / f"{name}.json").read_text())


def frac(decimal_string: str) -> Fraction:
    return Fraction(Decimal(decimal_string))


def oracle_ulp(decimal_string: str) -> Fraction:
    """One unit in the last significant digit of the decimal string."""
    d = Decimal(decimal_string)
    digits = len(d.as_tuple().digits)
    return Fraction(10) ** (d.adjusted() - digits + 1)


def mid_frac(enc) -> Fraction:
    return Fraction(gmpy2.mpq(enc.midpoint))


def rad_frac(enc) -> Fraction:
    return Fraction(gmpy2.mpq(enc.radius))


def assert_encloses_oracle(enc, decimal_string: str, slack_ulps: int = 1):
    """Assert |midpoint - oracle| <= radius + slack * oracle_ulp, exactly."""
    err = abs(mid_frac(enc) - frac(decimal_string))
    allowed = rad_frac(enc) + slack_ulps * oracle_ulp(decimal_string)
    assert err <= allowed, (
        f"midpoint off by {float(err):.3e}, allowed {float(allowed):.3e} "
        f"(radius {float(enc.radius):.3e}) vs oracle {decimal_string[:30]}...")
