"""Tests for zero location/refinement, certified sign evaluation, window
completeness certification, table persistence, and the build pipeline.

Oracle: tests/data/zeros.json holds the first 120 critical-line ordinates
at 50 digits, frozen from an independent evaluator before this package
existed.  Everything here runs from scratch (no cached tables).
"""

import math
import random
from fractions import Fraction

import gmpy2
import pytest
from gmpy2 import mpfr

from helpers import assert_encloses_oracle, frac, load
from zetaharmonic.enclosure import enc_from
from zetaharmonic.errors import (
    AmbiguityError,
    CertificationError,
    DomainError,
    TableFormatError,
)
from zetaharmonic.zeros import (
    CompletenessCertificate,
    ZeroOrdinate,
    ZeroTable,
    build_zero_table,
    certify_range,
    load_zero_table,
    locate_and_refine,
    save_zero_table,
    zero_sign_at,
    zero_table_io,
)

ZEROS_50D = load("zeros")["first_zeros_50d"]


@pytest.fixture(scope="module")
def first_window():
    return locate_and_refine(10, 100, target_radius=1e-12, precision_bits=96)


@pytest.fixture(scope="module")
def small_zeros(first_window):
    return [z for z in first_window if float(z.gamma.midpoint) < 40.0]


@pytest.fixture(scope="module")
def small_table(small_zeros):
    cert = certify_range(small_zeros, 38.0, precision_bits=96)
    indexed = [ZeroOrdinate(k + 1, z.gamma) for k, z in enumerate(small_zeros)]
    return ZeroTable(indexed, cert, {"generator": "test-suite"})


@pytest.fixture()
def table_file(small_table, tmp_path):
    path = tmp_path / "small.zt"
    save_zero_table(path, small_table)
    return path


# ----------------------------------------------------------------------
# locating and refining
# ----------------------------------------------------------------------

def test_locate_matches_oracle_below_100(first_window):
    expected = [g for g in ZEROS_50D if frac(g) <= 100]
    assert len(first_window) == len(expected) == 29
    for z, g in zip(first_window, expected):
        assert z.index is None  # unindexed until a table assigns positions
        assert float(z.gamma.radius) <= 1e-12
        assert_encloses_oracle(z.gamma, g)


def test_locate_results_strictly_increasing(first_window):
    for a, b in zip(first_window, first_window[1:]):
        assert b.gamma.lower_q() > a.gamma.upper_q()


def test_locate_subwindow_is_bitwise_consistent(first_window):
    sub = locate_and_refine(30, 60, target_radius=1e-12, precision_bits=96)
    want = [z for z in first_window if 30 < float(z.gamma.midpoint) <= 60]
    assert len(sub) == len(want) == 10
    for a, b in zip(sub, want):
        assert a.gamma.midpoint == b.gamma.midpoint
        assert a.gamma.radius == b.gamma.radius


def test_locate_workers_bitwise_deterministic():
    serial = locate_and_refine(10, 200, target_radius=1e-12, precision_bits=96)
    for workers in (2, 3):
        sharded = locate_and_refine(10, 200, target_radius=1e-12,
                                    precision_bits=96, workers=workers)
        assert len(sharded) == len(serial)
        for a, b in zip(sharded, serial):
            assert a.gamma.midpoint == b.gamma.midpoint
            assert a.gamma.radius == b.gamma.radius


def test_locate_random_windows_count_matches_oracle():
    rng = random.Random(8151)
    gammas = [frac(g) for g in ZEROS_50D]
    for _ in range(5):
        while True:
            a = rng.uniform(15.0, 230.0)
            b = a + rng.uniform(5.0, 25.0)
            if all(abs(float(g) - e) > 1e-3 for g in gammas for e in (a, b)):
                break
        found = locate_and_refine(a, b, target_radius=1e-12, precision_bits=96)
        assert len(found) == sum(1 for g in gammas if a < g <= b)


def test_locate_empty_stretches():
    assert locate_and_refine(10.0, 14.0) == []   # first zero is above 14.13
    assert locate_and_refine(4.0, 9.0) == []     # below the scan floor


def test_locate_domain_errors():
    with pytest.raises(DomainError):
        locate_and_refine(50.0, 40.0)
    with pytest.raises(DomainError):
        locate_and_refine(1.5, 40.0)
    with pytest.raises(DomainError):
        locate_and_refine(10.0, 40.0, target_radius=0.0)
    with pytest.raises(DomainError):
        locate_and_refine(10.0, 40.0, target_radius=1.0)


def test_locate_near_coefficient_singularity_stays_tight():
    # heights with frac(sqrt(t/2pi)) near 3/4 shred the fast evaluator's
    # correction jets; refinement must still reach the requested radius
    band96 = locate_and_refine(13148, 13154, target_radius=1e-12,
                               precision_bits=96)
    band160 = locate_and_refine(13148, 13154, target_radius=1e-12,
                                precision_bits=160)
    assert len(band96) == len(band160) == 6
    for a, b in zip(band96, band160):
        assert float(a.gamma.radius) <= 1e-12
        gap = abs(float(a.gamma.midpoint - b.gamma.midpoint))
        assert gap <= float(a.gamma.radius) + float(b.gamma.radius)


# ----------------------------------------------------------------------
# certified signs
# ----------------------------------------------------------------------

def test_sign_flips_across_oracle_zeros():
    for k in (0, 9, 49, 119):
        g = float(frac(ZEROS_50D[k]))
        lo = zero_sign_at(mpfr(g - 0.02, 96), 96)
        hi = zero_sign_at(mpfr(g + 0.02, 96), 96)
        assert lo != 0 and hi != 0 and lo == -hi


def test_sign_resolves_a_whisker_from_a_zero():
    # the first zero lies strictly between these 6-decimal neighbours
    lo = zero_sign_at(mpfr("14.134725", 96), 96)
    hi = zero_sign_at(mpfr("14.134726", 96), 96)
    assert lo != 0 and hi != 0 and lo == -hi


def test_sign_fast_and_direct_paths_agree_in_singular_band():
    t = mpfr("13150.75", 96)
    fast = zero_sign_at(t, 96)
    direct = zero_sign_at(t, 96, force_em=True)
    assert fast != 0 and fast == direct


def test_sign_receipts_record_and_replay():
    t = mpfr("100.25", 96)
    receipts = {}
    s = zero_sign_at(t, 96, receipts=receipts)
    key = gmpy2.to_binary(t)
    assert s != 0 and receipts == {key: s}
    # replay is authoritative: a stored sign short-circuits evaluation
    assert zero_sign_at(t, 96, receipts={key: -s}) == -s


# ----------------------------------------------------------------------
# completeness certification
# ----------------------------------------------------------------------

def test_certify_range_basic(small_zeros):
    cert = certify_range(small_zeros, 30.0, precision_bits=96)
    assert cert.method == "turing_window"
    assert cert.zero_count == 3
    assert cert.height.contains(30)
    assert cert.recheck() is True


def test_certify_missing_zero_fails(small_zeros):
    gapped = small_zeros[:1] + small_zeros[2:]
    with pytest.raises(CertificationError):
        certify_range(gapped, 30.0, precision_bits=96)


def test_certify_fake_zero_fails(small_zeros):
    fake = ZeroOrdinate(None, enc_from("27.5", 96, radius=1e-10))
    padded = small_zeros[:3] + [fake] + small_zeros[3:]
    with pytest.raises(CertificationError) as err:
        certify_range(padded, 30.0, precision_bits=96)
    assert "sign verification" in str(err.value)


def test_certify_height_on_a_candidate_is_ambiguous(small_zeros):
    t = float(small_zeros[2].gamma.midpoint)
    with pytest.raises(AmbiguityError):
        certify_range(small_zeros, t, precision_bits=96)


def test_certify_input_domain_errors(small_zeros):
    with pytest.raises(DomainError):
        certify_range(small_zeros, 5.0, precision_bits=96)
    doubled = small_zeros[:1] + small_zeros
    with pytest.raises(DomainError):
        certify_range(doubled, 30.0, precision_bits=96)


def test_recheck_rejects_tampered_evidence(small_table):
    cert = small_table.certificate
    assert cert.recheck() is True
    bumped = dict(cert.window_evidence)
    bumped["n_below"] = str(cert.zero_count + 1)
    tampered = CompletenessCertificate(cert.height, cert.zero_count,
                                       "turing_window", bumped)
    assert tampered.recheck() is False
    dropped = dict(cert.window_evidence)
    del dropped["n_integral_lower"]
    gutted = CompletenessCertificate(cert.height, cert.zero_count,
                                     "turing_window", dropped)
    assert gutted.recheck() is False
    miscounted = CompletenessCertificate(cert.height, cert.zero_count + 1,
                                         "turing_window",
                                         dict(cert.window_evidence))
    assert miscounted.recheck() is False


# ----------------------------------------------------------------------
# table persistence
# ----------------------------------------------------------------------

def test_ordinate_constructor_rejects_garbage(small_zeros):
    with pytest.raises(DomainError):
        ZeroOrdinate(0, small_zeros[0].gamma)
    with pytest.raises(DomainError):
        ZeroOrdinate(1, enc_from("13.9", 96, radius=1e-12))


def test_count_at_most(small_table):
    assert small_table.count_at_most(14.0) == 0
    assert small_table.count_at_most(30.0) == 3
    assert small_table.count_at_most(37.59) == 6
    assert small_table.is_rigorous


def test_save_load_round_trip(small_table, table_file):
    back = load_zero_table(table_file)
    assert len(back) == len(small_table)
    for a, b in zip(back, small_table):
        assert a.index == b.index
        assert a.gamma.midpoint == b.gamma.midpoint
        assert float(a.gamma.radius) == float(b.gamma.radius)
    assert back.certificate.method == "turing_window"
    assert back.certificate.zero_count == small_table.certificate.zero_count
    assert back.certificate.recheck() is True
    assert back.is_rigorous
    assert back.source["generator"] == "test-suite"


def test_save_is_byte_idempotent(table_file, tmp_path):
    again = tmp_path / "again.zt"
    save_zero_table(again, load_zero_table(table_file))
    assert again.read_bytes() == table_file.read_bytes()


def test_zero_table_io_dispatch(small_table, tmp_path):
    path = tmp_path / "io.zt"
    zero_table_io("save", path, small_table)
    back = zero_table_io("load", path)
    assert len(back) == len(small_table)
    with pytest.raises(DomainError):
        zero_table_io("save", path)
    with pytest.raises(DomainError):
        zero_table_io("append", path, small_table)


def test_save_refuses_unflagged_uncertified(small_table, tmp_path):
    bare = ZeroTable(small_table.zeros, None, {})
    with pytest.raises(DomainError):
        save_zero_table(tmp_path / "bare.zt", bare)
    flagged = ZeroTable(small_table.zeros, None, {"uncertified": "true"})
    save_zero_table(tmp_path / "flagged.zt", flagged)
    back = load_zero_table(tmp_path / "flagged.zt")
    assert back.certificate is None and not back.is_rigorous


def _expect_load_error(path, mutate):
    lines = path.read_text().splitlines()
    body0 = next(i for i, s in enumerate(lines) if not s.startswith("#"))
    mutate(lines, body0)
    path.write_text("\n".join(lines) + "\n")
    with pytest.raises(TableFormatError) as err:
        load_zero_table(path)
    return err.value


def test_load_reports_swapped_lines(table_file):
    def mutate(lines, body0):
        lines[body0 + 1], lines[body0 + 2] = lines[body0 + 2], lines[body0 + 1]
    err = _expect_load_error(table_file, mutate)
    exp = table_file.read_text().splitlines()
    body0 = next(i for i, s in enumerate(exp) if not s.startswith("#"))
    assert err.line_number == body0 + 2  # 1-based line of the first bad index
    assert "contiguity" in str(err)


def test_load_reports_checksum_mismatch(table_file):
    def mutate(lines, body0):
        # flip a trailing ordinate digit: still parses, still monotone
        lines[body0] = lines[body0].replace("8 9.09", "9 9.09", 1)
    err = _expect_load_error(table_file, mutate)
    assert "checksum" in str(err)
    assert err.line_number == len(table_file.read_text().splitlines())


def test_load_reports_missing_checksum(table_file):
    err = _expect_load_error(table_file, lambda lines, b: lines.pop())
    assert "checksum" in str(err)


def test_load_reports_blank_and_trailing_lines(table_file):
    err = _expect_load_error(table_file,
                             lambda lines, b: lines.insert(b + 2, ""))
    assert "blank line" in str(err)
    err = _expect_load_error(table_file,
                             lambda lines, b: lines.append("9 99.5 1e-12"))
    assert "after checksum" in str(err)


def test_load_reports_header_problems(table_file):
    def badcount(lines, b):
        k = next(i for i, s in enumerate(lines) if s.startswith("# count="))
        lines[k] = "# count=7"
    err = _expect_load_error(table_file, badcount)
    assert "count=7" in str(err) and "6" in str(err)


def test_load_reports_malformed_radius(table_file):
    def mutate(lines, body0):
        toks = lines[body0].split()
        toks[2] = "-1e-12"
        lines[body0] = " ".join(toks)
    err = _expect_load_error(table_file, mutate)
    assert "malformed ordinate" in str(err)
    exp = table_file.read_text().splitlines()
    body0 = next(i for i, s in enumerate(exp) if not s.startswith("#"))
    assert err.line_number == body0 + 1


def test_external_table_ingestion(tmp_path):
    path = tmp_path / "external.zt"
    rows = "\n".join(g for g in ZEROS_50D[:5])
    path.write_text("# external_trusted\n# radius=1e-9\n# count=5\n"
                    + rows + "\n")
    table = load_zero_table(path)
    assert len(table) == 5
    assert [z.index for z in table] == [1, 2, 3, 4, 5]
    assert table.certificate.method == "external_trusted"
    assert not table.is_rigorous  # provenance is not proof
    assert table.certificate.recheck() is True
    for z, g in zip(table, ZEROS_50D[:5]):
        assert_encloses_oracle(z.gamma, g)
        assert float(z.gamma.radius) == 1e-9
    assert table.count_at_most(30.0) == 3


def test_external_checksum_validated_when_present(tmp_path):
    path = tmp_path / "external.zt"
    path.write_text("# external_trusted\n" + ZEROS_50D[0] + "\n"
                    + "#checksum=sha256:" + "0" * 64 + "\n")
    with pytest.raises(TableFormatError) as err:
        load_zero_table(path)
    assert "checksum" in str(err.value)


# ----------------------------------------------------------------------
# build pipeline
# ----------------------------------------------------------------------

def test_build_by_count():
    table = build_zero_table(count=12, precision_bits=96)
    assert len(table) == 12
    assert [z.index for z in table] == list(range(1, 13))
    assert table.is_rigorous and table.certificate.zero_count == 12
    for z, g in zip(table, ZEROS_50D[:12]):
        assert_encloses_oracle(z.gamma, g)
    # certified height pins the count: above zero 12, below zero 13
    height = Fraction(*table.certificate.height.midpoint.as_integer_ratio())
    assert table.zeros[-1].gamma.upper_q() < height < frac(ZEROS_50D[12])


def test_build_by_height():
    table = build_zero_table(height=50.0, precision_bits=96)
    assert len(table) == 10  # zeros up to 49.77; the next sits at 52.97
    assert table.count_at_most(50.0) == 10
    assert table.certificate.height.contains(50)
    assert table.is_rigorous


def test_build_selector_errors():
    with pytest.raises(DomainError):
        build_zero_table()
    with pytest.raises(DomainError):
        build_zero_table(count=10, height=50.0)
    with pytest.raises(DomainError):
        build_zero_table(count=0)


def test_build_keep_uncertified_surfaces_failure(monkeypatch, tmp_path):
    from zetaharmonic.zeros import pipeline

    def boom(*args, **kwargs):
        raise CertificationError("synthetic window failure")

    monkeypatch.setattr(pipeline, "certify_range", boom)
    with pytest.raises(CertificationError):
        build_zero_table(count=5, precision_bits=96)
    table = build_zero_table(count=5, precision_bits=96, keep_uncertified=True)
    assert table.certificate is None
    assert table.source["uncertified"] == "true"
    assert "synthetic" in table.source["certification_failure"]
    assert len(table) == 5
    # the flagged partial result still round-trips through persistence
    path = tmp_path / "partial.zt"
    save_zero_table(path, table)
    back = load_zero_table(path)
    assert back.certificate is None and len(back) == 5
