"""Completeness certification for zero tables by window counting.

The test integrates the located-count step function over a window [t1, t2]
above the height T being certified and compares it against the integral of
the smooth count term plus explicit bounds on the fluctuating parts.  If the
candidate list missed any zero below t1, the true count exceeds the located
count by at least one over the whole window, inflating the true integral by
the window length — more than the fluctuation bounds allow.  Failing the
comparison therefore never certifies; passing it proves the list complete
below t1.  (This is the classical counting argument of Turing; see also
Trudgian, "Improvements to Turing's method".)

Soundness requires that every counted candidate is a genuine, distinct zero:
each enclosure is verified by opposite rigorous signs of Z at its endpoints,
and enclosures must be pairwise disjoint.  Sign evaluations performed during
refinement can be replayed through a shared receipts mapping, making
certification of a freshly built table nearly free; cold data is re-verified
honestly.

All quantities entering the final inequality are one-sided: the step-count
integral is a lower bound built from enclosure upper endpoints in exact
rational arithmetic, the smooth-term integral is an enclosure upper bound,
and the fluctuation bounds are rounded upward.
"""

import decimal
import math
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Union

from gmpy2 import mpfr

from ..counting import (BoundParams, DEFAULT_PARAMS, big_l_integral,
                        s1_window_bound)
from ..enclosure import (Enclosure, context, enc_apply, mpfr_to_decimal,
                         require_precision)
from ..errors import AmbiguityError, CertificationError, DomainError
from .search import locate_and_refine, zero_sign_at
from .table import CompletenessCertificate, ZeroOrdinate, ZeroTable

_BASE_WINDOW = 60.0   # starting window length above T
_MAX_DOUBLINGS = 4    # 60 -> 960 at most
_TARGET_RADIUS = 1e-12
# require a visible margin so the certificate also re-checks cleanly after
# its evidence round-trips through decimal strings
_MIN_MARGIN = Fraction(1, 10 ** 6)


def _dec_of_fraction(fr: Fraction, sig: int, rounding: str) -> str:
    """Directed decimal rendering of an exact rational."""
    ctx = decimal.Context(prec=sig, rounding=rounding)
    # int() coercion: components may be gmpy2 integers, which Decimal rejects
    return str(ctx.divide(decimal.Decimal(int(fr.numerator)),
                          decimal.Decimal(int(fr.denominator))))


def _float_up_q(q: Fraction) -> float:
    """Smallest float64 >= q (q assumed well inside float range)."""
    n, d = int(q.numerator), int(q.denominator)
    f = n / d
    if Fraction(f) < Fraction(n, d):
        f = math.nextafter(f, math.inf)
    return f


def _as_point(t, p: int) -> mpfr:
    """Certification height as a concrete mpfr point."""
    if isinstance(t, Enclosure):
        return mpfr(t.midpoint, p)
    if isinstance(t, (int, float, mpfr, str)):
        return mpfr(t, p)
    raise DomainError(f"unsupported height type {type(t).__name__}")


def _candidate_list(zeros) -> List[ZeroOrdinate]:
    if isinstance(zeros, ZeroTable):
        return list(zeros.zeros)
    out = list(zeros)
    for z in out:
        if not isinstance(z, ZeroOrdinate):
            raise DomainError("candidates must be ZeroOrdinate instances")
    return out


def _verify_entry(z: ZeroOrdinate, p: int,
                  receipts: Optional[Dict[bytes, int]]) -> bool:
    """A candidate is genuine iff Z has opposite rigorous signs at its
    enclosure endpoints.  Endpoint derivation matches the refinement step
    bit-for-bit, so in-pipeline receipts replay without re-evaluation."""
    ctx = context(z.gamma.precision_bits)
    lo = ctx.sub(z.gamma.midpoint, z.gamma.radius)
    hi = ctx.add(z.gamma.midpoint, z.gamma.radius)
    sl = zero_sign_at(lo, p, receipts)
    sh = zero_sign_at(hi, p, receipts)
    return sl != 0 and sh != 0 and sl != sh


def _log_ratio_upper(t2: mpfr, t1: mpfr, p: int) -> float:
    """float64 upper bound of log(t2/t1)."""
    e1 = Enclosure(mpfr(t1, p), mpfr(0, 64), p)
    e2 = Enclosure(mpfr(t2, p), mpfr(0, 64), p)
    val = enc_apply("log", (enc_apply("div", (e2, e1)),))
    return _float_up_q(val.upper_q())


def certify_range(zeros: Union[ZeroTable, Sequence[ZeroOrdinate]], t,
                  *, precision_bits: int = 96,
                  params: BoundParams = DEFAULT_PARAMS,
                  receipts: Optional[Dict[bytes, int]] = None
                  ) -> CompletenessCertificate:
    """Certify that the candidate list restricted to (0, T] is complete.

    Returns a CompletenessCertificate whose evidence re-checks from its
    stored fields alone, or raises CertificationError with a failure report.
    The window above T starts at 60 units and doubles up to 4 times when the
    comparison is inconclusive.  Never returns a false certificate: every
    counted candidate is verified as a genuine zero, and all integral bounds
    are one-sided.
    """
    require_precision(precision_bits, 53, "certification")
    p = precision_bits
    if receipts is None:
        receipts = {}  # local replay cache: augmentation feeds verification
    cands = _candidate_list(zeros)
    t1 = _as_point(t, p)
    if float(t1) < math.tau * (1.0 - 2.0 ** -45):
        raise DomainError("certification height must be at least 2*pi")

    t1_q = Fraction(*t1.as_integer_ratio())
    uppers = [z.gamma.upper_q() for z in cands]
    lowers = [z.gamma.lower_q() for z in cands]
    for k in range(1, len(cands)):
        if not lowers[k] > uppers[k - 1]:
            raise DomainError(
                f"candidate enclosures must be disjoint and increasing; "
                f"entries {k - 1} and {k} violate this")
    for k in range(len(cands)):
        if lowers[k] <= t1_q < uppers[k]:
            raise AmbiguityError(
                f"certification height intersects the enclosure of "
                f"candidate {k}; counting at T is ambiguous")

    n_below = sum(1 for u in uppers if u <= t1_q)
    report: Dict[str, object] = {"height": str(mpfr_to_decimal(t1, 30)),
                                 "n_below": n_below, "windows": []}

    ctx = context(p + 16)
    window_zeros: List[ZeroOrdinate] = []
    aug_top_q = max(t1_q, uppers[-1]) if uppers else t1_q
    supplied_checked = 0  # prefix of `cands` already sign-verified
    window_checked = 0    # prefix of `window_zeros` already sign-verified

    for k in range(_MAX_DOUBLINGS + 1):
        width = _BASE_WINDOW * (2 ** k)
        t2 = ctx.add(t1, mpfr(width, 64))  # exact: width has few bits
        t2_q = Fraction(*t2.as_integer_ratio())

        # extend the window candidate set over the newly uncovered strip
        strip_lo = _float_up_q(aug_top_q)
        if strip_lo < float(t2):
            new = locate_and_refine(strip_lo, float(t2),
                                    target_radius=_TARGET_RADIUS,
                                    precision_bits=p, receipts=receipts)
            for z in new:
                # drop entries that could reach below T or touch known ones:
                # discarding only weakens the count's lower bound
                if z.gamma.lower_q() <= aug_top_q:
                    continue
                window_zeros.append(z)
                aug_top_q = z.gamma.upper_q()

        # verify every candidate that enters this window's count
        while supplied_checked < len(cands) and \
                uppers[supplied_checked] <= t2_q:
            if not _verify_entry(cands[supplied_checked], p, receipts):
                raise CertificationError(
                    f"candidate {supplied_checked} failed sign verification:"
                    f" no zero of Z is confirmed inside its enclosure",
                    report={"failed_entry": supplied_checked, **report})
            supplied_checked += 1
        while window_checked < len(window_zeros):
            if not _verify_entry(window_zeros[window_checked], p, receipts):
                raise CertificationError(
                    "window augmentation produced an unverifiable enclosure",
                    report=report)
            window_checked += 1

        # lower bound of the integral of the located-count step function
        n_int = Fraction(0)
        n_window = 0
        for u in uppers:
            if u <= t1_q:
                n_int += t2_q - t1_q
            elif u <= t2_q:
                n_int += t2_q - u
                n_window += 1
        for z in window_zeros:
            u = z.gamma.upper_q()
            if u <= t2_q:
                n_int += t2_q - u
                n_window += 1

        l_up = big_l_integral(t1, t2, precision_bits=128).upper_q()
        s1b = s1_window_bound(t1, t2, params)
        qw = math.nextafter(
            params.trudgian_q * _log_ratio_upper(t2, t1, p + 16), math.inf)

        # Fraction(float) is the float's exact binary value, so the bounds
        # stay one-sided through the comparison
        lhs = n_int
        rhs = l_up + Fraction(s1b) + Fraction(qw) - (t2_q - t1_q)
        margin = lhs - rhs
        report["windows"].append({
            "t2": str(mpfr_to_decimal(t2, 30)), "width": repr(width),
            "n_window": n_window,
            "margin": _dec_of_fraction(margin, 20, decimal.ROUND_FLOOR)})
        if margin > _MIN_MARGIN:
            evidence = {
                "t1": str(mpfr_to_decimal(t1, 50)),
                "t2": str(mpfr_to_decimal(t2, 50)),
                "window_width": repr(width),
                "n_below": str(n_below),
                "n_window": str(n_window),
                "n_integral_lower":
                    _dec_of_fraction(n_int, 45, decimal.ROUND_FLOOR),
                "l_integral_upper":
                    _dec_of_fraction(l_up, 45, decimal.ROUND_CEILING),
                "s1_bound": repr(s1b),
                "q_window_bound": repr(qw),
                "a0": repr(params.a0),
                "a1": repr(params.a1),
                "q_coeff": repr(params.trudgian_q),
                "margin": _dec_of_fraction(margin, 20, decimal.ROUND_FLOOR),
            }
            cert = CompletenessCertificate(
                height=Enclosure(mpfr(t1, p), mpfr(0, 64), p),
                zero_count=n_below, method="turing_window",
                window_evidence=evidence)
            if not cert.recheck():
                raise CertificationError(
                    "internal error: assembled certificate failed its own "
                    "recheck", report=report)
            return cert

    raise CertificationError(
        "certificate failed: the window inequality stayed inconclusive up "
        "to the maximal window; widen the window or check the candidate "
        "list for gaps below T", report=report)
