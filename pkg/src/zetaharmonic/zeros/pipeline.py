"""One-call construction of certified zero tables.

Builds a table either of the first `count` zeros or of every zero up to a
requested height: locate and refine enclosures, choose a certification
height that no enclosure straddles, run the window-counting certification
(reusing the refinement's endpoint sign receipts), and assemble a validated
ZeroTable with deterministic provenance metadata.
"""

import math
from fractions import Fraction
from typing import Dict, List, Optional

from gmpy2 import mpfr

from ..enclosure import context
from ..errors import CertificationError, DomainError, RefinementError
from .certify import certify_range
from .search import locate_and_refine
from .table import ZeroOrdinate, ZeroTable

_SEARCH_FLOOR = 10.0  # below the first zero at ~14.13
_GENERATOR = "zetaharmonic 0.1.0"


def _smooth_count(t: float) -> float:
    u = t / math.tau
    return u * (math.log(u) - 1.0) + 0.875


def _nth_zero_estimate(n: int) -> float:
    """float64 Newton solve of smooth-count(T) = n; a couple of zero gaps of
    accuracy is all the search margin needs."""
    t = max(20.0, math.tau * n / max(1.0, math.log(max(n, 2))))
    for _ in range(60):
        u = t / math.tau
        if u <= 1.0:
            t = math.tau * 1.5
            continue
        f = _smooth_count(t) - n
        df = math.log(u) / math.tau
        step = f / df
        t -= step
        if abs(step) < 1e-9 * t:
            break
    return t


def _mean_gap(t: float) -> float:
    return math.tau / max(1.0, math.log(t / math.tau))


def _merge_strip(zs: List[ZeroOrdinate], new: List[ZeroOrdinate]) -> None:
    """Append a freshly located strip, dropping any entry that overlaps the
    current top (a zero on the strip boundary can be found twice)."""
    top = zs[-1].gamma.upper_q() if zs else None
    for z in new:
        if top is not None and z.gamma.lower_q() <= top:
            continue
        zs.append(z)
        top = z.gamma.upper_q()


def _point_between(a: ZeroOrdinate, b: ZeroOrdinate, p: int) -> mpfr:
    """Exact midpoint of the gap between two adjacent enclosures."""
    ctx = context(p + 8)
    u = ctx.add(a.gamma.midpoint, a.gamma.radius)
    lo = ctx.sub(b.gamma.midpoint, b.gamma.radius)
    t = ctx.div(ctx.add(u, lo), mpfr(2))
    tq = Fraction(*t.as_integer_ratio())
    if not a.gamma.upper_q() < tq < b.gamma.lower_q():
        raise RefinementError(
            "adjacent zero enclosures leave no room for a certification "
            "height between them")
    return t


def build_zero_table(count: Optional[int] = None,
                     height: Optional[float] = None, *,
                     target_radius: float = 1e-12,
                     precision_bits: int = 96,
                     workers: int = 1,
                     keep_uncertified: bool = False) -> ZeroTable:
    """Build a certified table of the first `count` zeros, or of all zeros
    with ordinate at most `height` (exactly one selector must be given).

    In height mode the certified height is nudged just below any ordinate
    enclosure that straddles the requested value, so the table's content is
    unambiguous.  The returned table carries a turing_window certificate;
    construction fails loudly rather than ever returning an uncertified or
    miscounted table, unless `keep_uncertified` asks for the located zeros
    back as an explicitly flagged uncertified table when the window test
    fails (callers that want to save partial work must still see the
    failure: check `table.certificate is None`).
    """
    if (count is None) == (height is None):
        raise DomainError("give exactly one of count= or height=")
    p = precision_bits
    receipts: Dict[bytes, int] = {}
    zs: List[ZeroOrdinate] = []

    if count is not None:
        if count < 1:
            raise DomainError("count must be at least 1")
        est = _nth_zero_estimate(count)
        top = est + 6.0 * _mean_gap(est) + 2.0
        new = locate_and_refine(_SEARCH_FLOOR, top,
                                target_radius=target_radius,
                                precision_bits=p, workers=workers,
                                receipts=receipts)
        _merge_strip(zs, new)
        # need count+1 zeros to pin a certification height above zero #count
        extensions = 0
        while len(zs) < count + 1:
            extensions += 1
            if extensions > 16:
                raise RefinementError(
                    "zero search kept coming up short of the requested count")
            new_top = top + 10.0 * _mean_gap(top) + 1.0
            new = locate_and_refine(top, new_top,
                                    target_radius=target_radius,
                                    precision_bits=p, workers=workers,
                                    receipts=receipts)
            top = new_top
            _merge_strip(zs, new)
        t1 = _point_between(zs[count - 1], zs[count], p)
        kept = zs[:count]
        supplied = zs  # the extras feed the certification window
    else:
        if height < 14.0:
            raise DomainError("height must be at least 14 (below the first "
                              "zero there is nothing to tabulate)")
        t1 = mpfr(height, p)
        new = locate_and_refine(_SEARCH_FLOOR, float(height),
                                target_radius=target_radius,
                                precision_bits=p, workers=workers,
                                receipts=receipts)
        _merge_strip(zs, new)
        t1_q = Fraction(*t1.as_integer_ratio())
        for k, z in enumerate(zs):
            if z.gamma.lower_q() <= t1_q < z.gamma.upper_q():
                if k == 0:
                    raise DomainError(
                        "requested height sits inside the first zero's "
                        "enclosure; nothing below it to tabulate")
                t1 = _point_between(zs[k - 1], zs[k], p)
                t1_q = Fraction(*t1.as_integer_ratio())
                break
        kept = [z for z in zs if z.gamma.upper_q() <= t1_q]
        supplied = zs

    source = {"generator": _GENERATOR,
              "precision_bits": str(p),
              "target_radius": repr(target_radius)}
    indexed = [ZeroOrdinate(k + 1, z.gamma) for k, z in enumerate(kept)]
    try:
        cert = certify_range(supplied, t1, precision_bits=p, receipts=receipts)
    except CertificationError as exc:
        if not keep_uncertified:
            raise
        source["uncertified"] = "true"
        source["certification_failure"] = str(exc).splitlines()[0][:200]
        return ZeroTable(indexed, None, source)
    if cert.zero_count != len(kept):
        raise RefinementError(
            f"certified count {cert.zero_count} does not match the "
            f"{len(kept)} located zeros below the certification height")
    return ZeroTable(indexed, cert, source)
