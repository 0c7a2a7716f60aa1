"""Tests for the explicit counting bounds.

Oracle values in tests/data/counting.json were generated once by
tests/make_oracles.py with mpmath at high precision and are frozen; the
library under test never uses mpmath.
"""

import math
import random
from fractions import Fraction

import pytest

from zetaharmonic.counting import (
    BoundParams,
    DEFAULT_PARAMS,
    big_l,
    big_l_integral,
    e2_bound,
    lehman_bound,
    q_from_zeros,
    s1_window_bound,
)
from zetaharmonic.enclosure import Enclosure, enc_apply, enc_from
from zetaharmonic.errors import AmbiguityError, DomainError

from helpers import assert_encloses_oracle, frac, load, mid_frac, rad_frac

ORACLE = load("counting")


# ----------------------------------------------------------------------
# published constants
# ----------------------------------------------------------------------

def test_bound_params_digits():
    p = DEFAULT_PARAMS
    assert p.a0 == 2.067
    assert p.a1 == 0.059
    assert p.trudgian_q == 0.2
    assert p.lehman_a == 0.28
    assert p.e2_c0 == 4.27
    assert p.e2_c1 == 0.12
    assert p.t0 == math.tau


def test_bound_params_frozen():
    with pytest.raises(Exception):
        DEFAULT_PARAMS.a0 = 3.0


# ----------------------------------------------------------------------
# smooth term and its integral
# ----------------------------------------------------------------------

def test_big_l_oracles():
    assert_encloses_oracle(big_l(30), ORACLE["L_30"])
    assert_encloses_oracle(big_l(100), ORACLE["L_100"])
    assert_encloses_oracle(big_l(600270), ORACLE["L_600270"])


def test_big_l_accepts_enclosure_input():
    t = enc_from(30, precision_bits=192)
    assert_encloses_oracle(big_l(t), ORACLE["L_30"])


def test_big_l_domain():
    with pytest.raises(DomainError):
        big_l(1.0)
    with pytest.raises(DomainError):
        big_l(math.tau * 0.5)


def test_big_l_integral_oracles():
    assert_encloses_oracle(big_l_integral(30, 90), ORACLE["int_L_30_90"])
    assert_encloses_oracle(big_l_integral(100, 160), ORACLE["int_L_100_160"])


def test_big_l_integral_between_riemann_sums():
    # L is increasing on [30, 90], so the left/right Riemann sums bracket
    # the exact integral; the antiderivative-based enclosure must land
    # inside that bracket.
    lo, hi, panels = 30.0, 90.0, 240
    h = (hi - lo) / panels
    left = Fraction(0)
    right = Fraction(0)
    hq = Fraction(h)
    for k in range(panels):
        a = big_l(lo + k * h)
        b = big_l(lo + (k + 1) * h)
        left += (mid_frac(a) - rad_frac(a)) * hq
        right += (mid_frac(b) + rad_frac(b)) * hq
    got = big_l_integral(lo, hi)
    assert left <= mid_frac(got) - rad_frac(got)
    assert mid_frac(got) + rad_frac(got) <= right


# ----------------------------------------------------------------------
# one-sided bounds
# ----------------------------------------------------------------------

def _assert_tight_upper(bound: float, oracle: str):
    """The float bound must sit at or above the exact value, within a few
    parts in 1e9 of it (one-sided, but not slack)."""
    exact = frac(oracle)
    b = Fraction(bound)
    assert b >= exact
    assert b <= exact * (1 + Fraction(1, 10 ** 9))


def test_s1_window_oracles():
    _assert_tight_upper(s1_window_bound(math.tau, math.tau),
                        ORACLE["s1_window_2pi_2pi"])
    _assert_tight_upper(s1_window_bound(100.0, 200.0),
                        ORACLE["s1_window_100_200"])


def test_s1_window_domain():
    with pytest.raises(DomainError):
        s1_window_bound(1.0, 50.0)
    with pytest.raises(DomainError):
        s1_window_bound(200.0, 100.0)


def test_e2_oracles():
    _assert_tight_upper(e2_bound(math.tau), ORACLE["e2_2pi"])
    _assert_tight_upper(e2_bound(600270.0), ORACLE["e2_600270"])


def test_lehman_oracles():
    _assert_tight_upper(lehman_bound(math.tau * math.e),
                        ORACLE["lehman_2pie"])
    _assert_tight_upper(lehman_bound(600270.0), ORACLE["lehman_600270"])


def test_bound_domains():
    with pytest.raises(DomainError):
        e2_bound(2.0)
    with pytest.raises(DomainError):
        lehman_bound(math.tau)  # below 2*pi*e


def test_bounds_decrease():
    rng = random.Random(20260815)
    for _ in range(50):
        t = rng.uniform(18.0, 1e6)
        s = t * rng.uniform(1.5, 4.0)
        assert e2_bound(s) < e2_bound(t)
        assert lehman_bound(s) < lehman_bound(t)


# ----------------------------------------------------------------------
# residual from a zero table
# ----------------------------------------------------------------------

def test_q_from_zeros_at_100(table_200):
    q = q_from_zeros(100.0, table_200)
    expected = Fraction(ORACLE["N_100"]) - frac(ORACLE["L_100"])
    assert abs(mid_frac(q) - expected) <= rad_frac(q) + Fraction(1, 10 ** 40)


def test_q_plus_l_contains_integer_count(table_200):
    rng = random.Random(8151)
    tops = float(table_200.certificate.height.midpoint)
    for _ in range(25):
        t = rng.uniform(20.0, tops * 0.999)
        n = table_200.count_at_most(t)
        total = enc_apply("add", (q_from_zeros(t, table_200), big_l(t)))
        assert total.contains(n), (t, n, str(total))


def test_q_from_zeros_ambiguous_inside_enclosure(table_200):
    g = table_200.zeros[0].gamma
    with pytest.raises(AmbiguityError):
        q_from_zeros(Enclosure(g.midpoint, g.radius, g.precision_bits),
                     table_200)


def test_q_from_zeros_above_certified_height(table_200):
    top = float(table_200.certificate.height.midpoint)
    with pytest.raises(DomainError):
        q_from_zeros(top + 10.0, table_200)


def test_q_from_zeros_needs_certificate(table_200):
    from zetaharmonic.zeros.table import ZeroTable
    bare = ZeroTable(table_200.zeros, None, {"uncertified": "true"})
    with pytest.raises(DomainError):
        q_from_zeros(100.0, bare)
