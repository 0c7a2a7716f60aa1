"""Tests for the midpoint-radius enclosure core.

Reference values in tests/data/constants.json were generated once by
tests/make_oracles.py with mpmath at 1000 decimal digits and are frozen;
the library under test never uses mpmath.
"""

import json
import math
import pathlib
import random
from decimal import Decimal
from fractions import Fraction

import gmpy2
import pytest
from gmpy2 import mpfr

from zetaharmonic.enclosure import (
    CONSTANTS,
    Enclosure,
    enc_apply,
    enc_const,
    enc_from,
    to_display,
    ulp,
)
from zetaharmonic.errors import DomainError

DATA = pathlib.Path(__file__).parent / "data"
ORACLE = json.loads((DATA / "constants.json").read_text())


def frac(decimal_string: str) -> Fraction:
    return Fraction(Decimal(decimal_string))


# ----------------------------------------------------------------------
# arithmetic examples
# ----------------------------------------------------------------------

def test_add_exact_integers():
    out = enc_apply("add", (enc_from(2, 64), enc_from(3, 64)))
    assert out.contains(5)
    assert float(out.radius) <= 2.0 * ulp(out.midpoint, 64)


def test_log_of_one_is_zero():
    out = enc_apply("log", (enc_from(1, 64),))
    assert out.contains(0)
    # log 1 == 0 exactly; allow only the one-ulp bookkeeping pad
    assert float(out.radius) <= 2.0 ** -60


def test_div_one_third_contains_1000_digit_oracle():
    out = enc_apply("div", (enc_from(1, 128), enc_from(3, 128)))
    assert out.precision_bits == 128
    assert out.contains(frac(ORACLE["one_third"]))
    assert out.contains("0.333333333333333333333333333333333333333333")


def test_sub_and_mul_points():
    a = enc_from(7, 96)
    b = enc_from(4, 96)
    assert enc_apply("sub", (a, b)).contains(3)
    assert enc_apply("mul", (a, b)).contains(28)


def test_sqr_matches_mul_containment():
    x = enc_from("1.7320508075688772", 128)
    s = enc_apply("sqr", (x,))
    m = enc_apply("mul", (x, x))
    # both must contain the exact square of every point; check a shared witness
    w = frac("1.7320508075688772") ** 2
    assert s.contains(w) and m.contains(w)


def test_exp_log_round_trip():
    x = enc_from("2.5", 192)
    back = enc_apply("log", (enc_apply("exp", (x,)),))
    assert back.contains(frac("2.5"))
    assert float(back.radius) < 1e-50


# ----------------------------------------------------------------------
# constants
# ----------------------------------------------------------------------

@pytest.mark.parametrize("name", CONSTANTS)
@pytest.mark.parametrize("prec", [16, 53, 64, 128, 192, 384])
def test_constants_contain_oracle(name, prec):
    out = enc_const(name, prec)
    assert out.precision_bits == prec
    assert out.contains(frac(ORACLE[name]))
    assert float(out.radius) <= 2.0 * ulp(out.midpoint, prec)


def test_const_pi_64_radius_bound():
    out = enc_const("pi", 64)
    assert float(out.radius) <= 2.0 ** -62


def test_const_log_two_pi_128_value():
    out = enc_const("log_two_pi", 128)
    assert out.contains(frac(ORACLE["log_two_pi"]))
    assert to_display(out, 17).startswith("1.8378770664093455")


def test_two_pi_consistent_with_definition():
    p = 128
    via_mul = enc_apply("mul", (enc_const("pi", p), enc_from(2, p)))
    direct = enc_const("two_pi", p)
    # both contain the true constant, so they must overlap
    assert direct.lower_q() <= via_mul.upper_q()
    assert via_mul.lower_q() <= direct.upper_q()
    assert direct.contains(frac(ORACLE["two_pi"]))
    assert via_mul.contains(frac(ORACLE["two_pi"]))


def test_unknown_constant_rejected():
    with pytest.raises(DomainError):
        enc_const("golden_ratio", 64)


def test_low_precision_rejected():
    with pytest.raises(DomainError):
        enc_const("pi", 8)


# ----------------------------------------------------------------------
# domain errors
# ----------------------------------------------------------------------

def test_div_by_straddling_enclosure_raises():
    num = enc_from(1, 64)
    den = enc_from(0.25, 64, radius=0.5)  # interval [-0.25, 0.75] contains 0
    with pytest.raises(DomainError):
        enc_apply("div", (num, den))


def test_div_by_exact_zero_raises():
    with pytest.raises(DomainError):
        enc_apply("div", (enc_from(1, 64), enc_from(0, 64)))


def test_log_nonpositive_raises():
    with pytest.raises(DomainError):
        enc_apply("log", (enc_from(-2, 64),))
    with pytest.raises(DomainError):
        enc_apply("log", (enc_from(0, 64),))
    with pytest.raises(DomainError):
        enc_apply("log", (enc_from(1e-30, 64, radius=1e-29),))


def test_bad_arity_and_op_name():
    a = enc_from(1, 64)
    with pytest.raises(DomainError):
        enc_apply("add", (a,))
    with pytest.raises(DomainError):
        enc_apply("log", (a, a))
    with pytest.raises(DomainError):
        enc_apply("pow", (a, a))
    with pytest.raises(TypeError):
        enc_apply("add", (a, 1.0))


def test_negative_radius_rejected():
    with pytest.raises(DomainError):
        Enclosure(mpfr(1), mpfr(-1e-3), 64)


# ----------------------------------------------------------------------
# containment property: base-precision enclosure must contain the same
# computation done at 4x precision (which is far closer to the truth)
# ----------------------------------------------------------------------

def _random_enclosure(rng, prec):
    # spread magnitudes over many decades, keep values well away from
    # overflow; radius between exact and ~1e-3 relative
    m = rng.uniform(-1.0, 1.0) * 10.0 ** rng.randint(-12, 12)
    if m == 0.0:
        m = 1.0
    r = 0.0 if rng.random() < 0.3 else abs(m) * 10.0 ** rng.uniform(-25, -3)
    return enc_from(m, prec, radius=r)


def _apply_random_op(rng, a, b, prec):
    op = rng.choice(["add", "sub", "mul", "div", "log", "sqr", "exp"])
    try:
        if op in ("add", "sub", "mul", "div"):
            return op, enc_apply(op, (a, b), precision_bits=prec)
        if op == "exp" and abs(float(a.midpoint)) > 500.0:
            return None, None  # keep exp out of overflow territory
        return op, enc_apply(op, (a,), precision_bits=prec)
    except DomainError:
        return None, None  # random input outside the op's domain: skip


def test_containment_10000_random_against_4x_precision():
    rng = random.Random(20260815)
    base, high = 64, 256
    checked = 0
    for _ in range(10_000):
        a = _random_enclosure(rng, base)
        b = _random_enclosure(rng, base)
        op, out = _apply_random_op(rng, a, b, base)
        if op is None:
            continue
        # same computation at 4x precision from the same input midpoints
        a4 = enc_from(a.midpoint, high, radius=float(a.radius))
        b4 = enc_from(b.midpoint, high, radius=float(b.radius))
        args = (a4, b4) if op in ("add", "sub", "mul", "div") else (a4,)
        out4 = enc_apply(op, args, precision_bits=high)
        # the high-precision midpoint is a near-exact value of the op
        # applied to the input midpoints, so it must lie in the enclosure
        assert out.contains(out4.midpoint), (op, str(a), str(b))
        checked += 1
    assert checked > 8_000  # domain skips must stay a small minority


def test_chained_expression_contains_high_precision_value():
    # log((pi*e + 2)^2 / 7) evaluated at 64 vs 512 bits
    def build(prec):
        pi = enc_const("pi", prec)
        e = enc_const("e", prec)
        t = enc_apply("mul", (pi, e), precision_bits=prec)
        t = enc_apply("add", (t, enc_from(2, prec)), precision_bits=prec)
        t = enc_apply("sqr", (t,), precision_bits=prec)
        t = enc_apply("div", (t, enc_from(7, prec)), precision_bits=prec)
        return enc_apply("log", (t,), precision_bits=prec)

    lo, hi = build(64), build(512)
    assert lo.contains(hi.midpoint)
    assert hi.is_subset_of(lo)


# ----------------------------------------------------------------------
# monotone containment for unary ops
# ----------------------------------------------------------------------

@pytest.mark.parametrize("op", ["log", "sqr", "exp"])
def test_monotone_containment_unary(op):
    rng = random.Random(987123 + hash(op) % 1000)
    for _ in range(300):
        m = rng.uniform(0.1, 50.0)
        r_small = m * 10.0 ** rng.uniform(-20, -8)
        r_big = r_small * rng.uniform(2.0, 100.0)
        inner = enc_from(m, 96, radius=r_small)
        outer = enc_from(m, 96, radius=r_big)
        assert inner.is_subset_of(outer)
        f_inner = enc_apply(op, (inner,))
        f_outer = enc_apply(op, (outer,))
        assert f_inner.is_subset_of(f_outer), (op, m, r_small, r_big)


def test_monotone_containment_shifted_subset():
    # subset with a different midpoint, not just a smaller radius
    rng = random.Random(5511)
    for _ in range(300):
        m = rng.uniform(0.5, 20.0)
        r = m * 1e-6
        off = rng.uniform(-0.5, 0.5) * r
        inner = enc_from(m + off, 96, radius=r * 0.25)
        outer = enc_from(m, 96, radius=r)
        if not inner.is_subset_of(outer):
            continue
        for op in ("log", "sqr", "exp"):
            assert enc_apply(op, (inner,)).is_subset_of(enc_apply(op, (outer,)))


# ----------------------------------------------------------------------
# radius subadditivity for add/sub
# ----------------------------------------------------------------------

@pytest.mark.parametrize("op", ["add", "sub"])
def test_radius_subadditivity_add_sub(op):
    rng = random.Random(331)
    for _ in range(2_000):
        a = _random_enclosure(rng, 80)
        b = _random_enclosure(rng, 80)
        out = enc_apply(op, (a, b))
        slack = 2.0 * ulp(out.midpoint, 80)
        assert float(out.radius) >= float(a.radius) + float(b.radius) - slack


# ----------------------------------------------------------------------
# decimal display
# ----------------------------------------------------------------------

def test_display_format_and_rounding():
    x = enc_from("2.5", 128, radius=1e-30)
    s = to_display(x, 10)
    assert s.split(" ±")[0] == "2.5" and "±" in s  # exact value, short form
    # ties round to even at the cut digit; 1/8 and 3/8 are binary-exact
    assert to_display(enc_from(0.125, 128), 2).split(" ±")[0] == "0.12"
    assert to_display(enc_from(0.375, 128), 2).split(" ±")[0] == "0.38"
    # non-tie rounds normally
    assert to_display(enc_from(0.1875, 128), 2).split(" ±")[0] == "0.19"


def test_display_radius_is_upper_bound():
    x = enc_from(1, 128, radius=1.23e-9)
    shown = to_display(x, 5).split("± ")[1]
    assert Decimal(shown) >= Decimal("1.23e-9")


def test_point_enclosure_displays_zero_radius():
    assert to_display(enc_from(3, 64), 4).endswith("± 0")


# ----------------------------------------------------------------------
# misc API behaviour
# ----------------------------------------------------------------------

def test_contains_accepts_many_input_kinds():
    x = enc_from("1.5", 96, radius=1e-20)
    assert x.contains(Fraction(3, 2))
    assert x.contains("1.5")
    assert x.contains(mpfr("1.5"))
    assert not x.contains(2)


def test_sign_and_zero_exclusion():
    pos = enc_from(5, 64, radius=1e-3)
    zero = enc_from(0.0, 64, radius=1e-3)
    assert pos.sign() == 1 and pos.excludes_zero()
    assert zero.sign() == 0 and not zero.excludes_zero()
    assert enc_from(-5, 64, radius=1e-3).sign() == -1


def test_lower_upper_bracket_interval():
    x = enc_from("3.25", 128, radius=1e-10)
    assert x.lower() <= 3.25 - 1e-10
    assert x.upper() >= 3.25 + 1e-10
    assert x.upper() - x.lower() < 3e-10


def test_enclosures_are_immutable():
    x = enc_from(1, 64)
    with pytest.raises(AttributeError):
        x.midpoint = mpfr(2)
