"""Zero location: phase-grid scan plus rigorous bracket refinement.

The scan walks the grid of phase points g_k (where the Riemann-Siegel phase
theta(g_k) = k*pi) in fast float64 arithmetic, groups the grid into blocks
between "good" grid points (sign of Z agrees with the parity (-1)^k by a
safe margin), and subdivides inside each block until the expected number of
sign changes appears.  In the heights this package targets every block
yields its count after a few subdivisions; the depth cap and the rigorous
ball-grid fallback exist for the rare harder blocks.

Refinement is two-stage: a float64 false-position pass narrows a bracket to
~1e-8, then one or two Newton-style corrections driven by rigorous midpoint
evaluations place a dyadic center c, and two rigorous sign evaluations at
c +/- delta (delta a power of two at or below the target radius) certify by
the intermediate value theorem that a zero lies inside.  Nothing about the
float64 stage is trusted: the final enclosure stands on the two ball signs
alone.

The sign evaluations are the expensive rigorous facts about each located
zero, so they are returned to callers as "receipts" (exact evaluation point
-> certified sign); the completeness certifier consumes them to avoid
recomputing the same ball evaluations when it re-verifies candidate lists
produced in the same session.
"""

import math
from concurrent.futures import ProcessPoolExecutor
from typing import Dict, List, Optional, Sequence, Tuple

import gmpy2
from gmpy2 import mpfr

from ..enclosure import Enclosure, context
from ..errors import DomainError, RefinementError
from . import hardy
from ._kernels import theta64, z64
from .table import ZeroOrdinate

__all__ = ["locate_and_refine", "zero_sign_at"]

# no sign change of Z exists below the first ordinate near 14.13; scanning
# starts at the first phase-grid point ~9.67 regardless of how low the
# caller's window reaches
_SCAN_FLOOR = 10.0
_MIN_PHASE_INDEX = -1

_MAX_SCAN_DEPTH = 40          # per-block subdivision cap before escalation
_MAX_BLOCK_POINTS = 1 << 14   # hard cap on grid points per block

_TAU = math.tau


def _noise64(t: float) -> float:
    """Generous absolute error allowance for the float64 Z evaluator
    (measured worst error is ~4e-10 on the supported range; scale grows
    like t^(1/4) with the main-sum length)."""
    return 4e-9 * max(1.0, (t / _TAU) ** 0.25)


def _theta_deriv64(t: float) -> float:
    return 0.5 * math.log(t / _TAU) + 0.25 / (t * t)


def _phase_point64(k: int) -> float:
    """Float64 solution of theta(g) = k*pi (Newton; seeds from the smooth
    inversion of u(log u - 1) = k + 1/8 with u = g/2pi)."""
    x = k + 0.125
    u = 1.5
    if x > 1.0:
        u = max(1.5, x / max(1.0, math.log(x)))
    for _ in range(60):
        lu = math.log(u)
        f = u * (lu - 1.0) - x
        if lu <= 0.1:
            u = max(u - f, 1.05)
            continue
        u_new = u - f / lu
        if u_new <= 1.0:
            u_new = (u + 1.0) / 2.0
        if abs(u_new - u) < 1e-14 * u:
            u = u_new
            break
        u = u_new
    g = _TAU * u
    # polish on the true phase
    target = k * math.pi
    for _ in range(8):
        err = theta64(g) - target
        g -= err / _theta_deriv64(g)
        if abs(err) < 1e-10 * max(1.0, abs(target)):
            break
    return g


def _safe_z64(t: float) -> float:
    v = z64(t)
    if v == 0.0:  # measure-zero grid coincidence; nudge off the point
        v = z64(t + 1e-9)
    return v


def _is_good(k: int, z_val: float, g: float) -> bool:
    margin = max(1e-5, 50.0 * _noise64(g))
    return (z_val if k % 2 == 0 else -z_val) > margin


def _scan_block(pts: List[float], vals: List[float], need: int,
                precision_bits: int) -> List[Tuple[float, float, int, int]]:
    """Subdivide the grid inside a block until at least ``need`` sign
    changes of z64 appear; returns (a, b, sign_a, sign_b) brackets."""

    def changes():
        out = []
        for i in range(len(pts) - 1):
            sa = 1 if vals[i] > 0 else -1
            sb = 1 if vals[i + 1] > 0 else -1
            if sa != sb:
                out.append((pts[i], pts[i + 1], sa, sb))
        return out

    found = changes()
    depth = 0
    while len(found) < need and depth < _MAX_SCAN_DEPTH:
        if 2 * len(pts) - 1 > _MAX_BLOCK_POINTS:
            break
        new_pts: List[float] = []
        new_vals: List[float] = []
        for i in range(len(pts) - 1):
            mid = 0.5 * (pts[i] + pts[i + 1])
            new_pts += [pts[i], mid]
            new_vals += [vals[i], _safe_z64(mid)]
        new_pts.append(pts[-1])
        new_vals.append(vals[-1])
        pts, vals = new_pts, new_vals
        depth += 1
        found = changes()
    if len(found) < need:
        # precision escalation: rigorous signs on the current grid resolve
        # values the float64 evaluator cannot
        signs = [zero_sign_at(mpfr(x, precision_bits), precision_bits)
                 for x in pts]
        found = []
        for i in range(len(pts) - 1):
            if signs[i] != signs[i + 1] and signs[i] and signs[i + 1]:
                found.append((pts[i], pts[i + 1], signs[i], signs[i + 1]))
    return found


def zero_sign_at(t: mpfr, precision_bits: int = 96,
                 receipts: Optional[Dict[bytes, int]] = None,
                 force_em: bool = False) -> int:
    """Certified sign of Z at an exact point, via an escalation ladder:
    the cheap evaluator first, then the direct-summation path, then extra
    precision.  Returns +1 or -1; 0 only if the full ladder cannot separate
    the value from zero (the caller treats that as an evaluation point
    virtually on top of a zero and moves the point)."""
    key = gmpy2.to_binary(t) if receipts is not None else None
    if receipts is not None:
        got = receipts.get(key)
        if got is not None:
            return got
    p = precision_bits
    tm = mpfr(t, p)
    attempts = []
    t_f = float(tm)
    if not force_em and t_f >= hardy.RS_MIN_T:
        # the second rung recovers the precision the coefficient jets shed
        # near their removable singularities, at a fraction of the cost of
        # the direct-summation fallback
        attempts += [("rs", p), ("rs", p + 64)]
    attempts += [("em", p), ("em", p + 64), ("em", p + 128)]
    sign = 0
    for method, pw in attempts:
        ctx = context(pw)
        out = hardy._z_raw(ctx, pw, mpfr(tm, pw), 0.0, method)
        if out is None:
            continue
        m, r = out
        if abs(m) > r:
            sign = 1 if m > 0 else -1
            break
    if receipts is not None and sign != 0:
        receipts[key] = sign
    return sign


_STEER_RADIUS = 1e-10  # legit fast-path balls sit orders below this


def _ball_mid64(t: mpfr, p: int, force_em: bool) -> Tuple[mpfr, float]:
    """Rigorous midpoint/radius of Z at an exact point, preferring the fast
    path, for use as Newton data (only the containment is trusted).

    Near the removable singularities of the fast path's coefficient jets the
    ball stays sound but its radius blows up, which makes the midpoint
    useless for steering; extra working bits repair that for well under the
    cost of a direct summation, so escalate through them first."""
    ctx = context(p)
    t_f = float(t)
    if not force_em and t_f >= hardy.RS_MIN_T:
        for pw in (p, p + 64, p + 128):
            out = hardy._z_raw(context(pw), pw, mpfr(t, pw), 0.0, "rs")
            if out is not None and out[1] <= _STEER_RADIUS:
                return out
    return hardy._z_raw(ctx, p, t, 0.0, "em")


def _slope64(x: float) -> float:
    h = 1e-4  # curvature is mild; noise/h stays ~1e-4 absolute
    return (z64(x + h) - z64(x - h)) / (2.0 * h)


def _illinois64(a: float, b: float, fa: float, fb: float) -> float:
    """False-position with the Illinois anti-stagnation rule (halve the
    function value of an endpoint retained twice in a row); stops at the
    float64 noise floor and returns the best abscissa."""
    best_x, best_f = (a, abs(fa)) if abs(fa) < abs(fb) else (b, abs(fb))
    noise = _noise64(b)
    side = 0
    for _ in range(80):
        denom = fb - fa
        if denom == 0.0 or not math.isfinite(denom):
            break
        x = (a * fb - b * fa) / denom
        if not a < x < b:
            x = 0.5 * (a + b)
        fx = _safe_z64(x)
        if abs(fx) < best_f:
            best_x, best_f = x, abs(fx)
        if abs(fx) < 2.0 * noise:
            break
        if (fx > 0) == (fb > 0):
            b, fb = x, fx
            if side == 1:
                fa *= 0.5
            side = 1
        else:
            a, fa = x, fx
            if side == -1:
                fb *= 0.5
            side = -1
        if b - a < 5e-9:
            break
    return best_x


def _refine_bracket(a: float, b: float, sa: int, sb: int,
                    target_radius: float, precision_bits: int,
                    receipts: Dict[bytes, int]) -> Enclosure:
    """Shrink a float64 sign-change bracket to a certified enclosure of
    radius ~delta = 2^floor(log2(target_radius)).

    The loop keeps the running center as an mpfr: at large heights a single
    ulp of float64 is wider than delta, so corrections below ~1e-11 only
    exist at working precision.  Each pass takes one rigorous midpoint of Z
    at the center, one float64 slope, and certifies the Newton-corrected
    window by two rigorous endpoint signs; misses shift the center and
    escalate first to the direct-summation evaluator, then to extra bits.
    """
    p = precision_bits
    delta = math.ldexp(1.0, math.floor(math.log2(target_radius)))
    dl = mpfr(delta, 64)
    fa, fb = _safe_z64(a), _safe_z64(b)
    x = _illinois64(a, b, fa, fb)
    expected = 1.0 if sb > sa else -1.0  # slope direction across the bracket
    force_em = False
    p_work = p
    xm = mpfr(x, p_work)
    for attempt in range(8):
        ctx = context(p_work)
        xm = mpfr(xm, p_work)
        # Newton-polish the center on rigorous ball midpoints; the float64
        # slope only scales the step, so its ~1e-4 relative error leaves the
        # polished center well inside a quarter window
        for _ in range(5):
            zm, _zr = _ball_mid64(xm, p_work, force_em)
            slope = _slope64(float(xm))
            if slope == 0.0 or (slope > 0) != (expected > 0):
                slope = expected * max(1e-3, abs(slope))
            step = ctx.div(zm, mpfr(slope, p_work))
            c = ctx.sub(xm, step)
            cf = float(c)
            if not (a <= cf <= b):
                # overshoot past the scan bracket: bisect toward the wall it
                # escaped over (a moving target, unlike the fixed midpoint)
                wall = b if cf > b else a
                c = ctx.div(ctx.add(xm, mpfr(wall, p_work)), mpfr(2))
            xm = c
            if abs(float(step)) <= 0.25 * delta:
                break
        lo = ctx.sub(xm, dl)
        hi = ctx.add(xm, dl)
        sl = zero_sign_at(lo, p, receipts, force_em=force_em)
        sh = zero_sign_at(hi, p, receipts, force_em=force_em)
        if sl != 0 and sh != 0 and sl != sh:
            return _normalized(xm, delta, p, p_work)
        if sl == 0 or sh == 0:
            # a window endpoint sits virtually on the zero; slide the window
            xm = ctx.add(xm, ctx.div(dl, mpfr(3)))
        # otherwise keep xm: the next pass polishes it with better data
        if attempt == 0:
            force_em = True
        elif attempt >= 2:
            p_work = min(p + 128, p_work + 64)
    raise RefinementError(
        f"could not certify a zero enclosure of radius {target_radius:g} in "
        f"bracket ({a!r}, {b!r})", t_lo=a, t_hi=b)


def _normalized(c: mpfr, delta: float, p: int, p_work: int) -> Enclosure:
    """Round a certified center back to base precision, absorbing the
    rounding displacement into the radius (still below the target)."""
    if p_work == p:
        return Enclosure(mpfr(c, p), mpfr(delta, 64), p)
    cb = mpfr(c, p)
    ctx = context(p_work + 8)
    pad = abs(float(ctx.sub(c, cb))) * (1.0 + 1e-9) + 5e-324
    return Enclosure(cb, mpfr(delta * (1.0 + 2.0 ** -50) + pad, 64), p)


# ----------------------------------------------------------------------
# scan orchestration
# ----------------------------------------------------------------------

def _good_grid(lo: float, hi: float) -> Tuple[List[int], List[float], List[float]]:
    """Phase-grid indices covering [lo, hi], extended outward to good
    points; returns (indices, grid points, z64 values)."""
    th_lo = theta64(max(lo, _SCAN_FLOOR))
    k0 = max(_MIN_PHASE_INDEX, math.floor(th_lo / math.pi))
    guard = 0
    while k0 > _MIN_PHASE_INDEX and _phase_point64(k0) > lo:
        k0 -= 1
        guard += 1
        if guard > 64:
            raise RefinementError("scan grid failed to reach the lower edge",
                                  t_lo=lo, t_hi=hi)
    th_hi = theta64(max(hi, _SCAN_FLOOR))
    k1 = max(k0 + 1, math.ceil(th_hi / math.pi))
    guard = 0
    while _phase_point64(k1) < hi:
        k1 += 1
        guard += 1
        if guard > 64:
            raise RefinementError("scan grid failed to reach the upper edge",
                                  t_lo=lo, t_hi=hi)
    ks = list(range(k0, k1 + 1))
    gs = [_phase_point64(k) for k in ks]
    vs = [_safe_z64(g) for g in gs]
    # extend outward until both walls are good (runs of bad grid points are
    # short in practice; 64 is far beyond any observed run)
    steps = 0
    while not _is_good(ks[0], vs[0], gs[0]) and ks[0] > _MIN_PHASE_INDEX:
        steps += 1
        if steps > 64:
            raise RefinementError(
                "could not find a clean lower wall for the scan grid",
                t_lo=lo, t_hi=hi)
        ks.insert(0, ks[0] - 1)
        gs.insert(0, _phase_point64(ks[0]))
        vs.insert(0, _safe_z64(gs[0]))
    steps = 0
    while not _is_good(ks[-1], vs[-1], gs[-1]):
        steps += 1
        if steps > 64:
            raise RefinementError(
                "could not find a clean upper wall for the scan grid",
                t_lo=lo, t_hi=hi)
        ks.append(ks[-1] + 1)
        gs.append(_phase_point64(ks[-1]))
        vs.append(_safe_z64(gs[-1]))
    return ks, gs, vs


def _blocks_from_grid(ks, gs, vs):
    """Split the grid at good points; yield (pts, vals, need) per block."""
    good = [i for i in range(len(ks)) if _is_good(ks[i], vs[i], gs[i])]
    if not good:
        return [(list(gs), list(vs), max(1, len(ks) - 1))]
    blocks = []
    # a leading bad wall can only happen at the absolute bottom of the grid
    if good[0] != 0:
        blocks.append((gs[:good[0] + 1], vs[:good[0] + 1], good[0]))
    for i, j in zip(good, good[1:]):
        blocks.append((gs[i:j + 1], vs[i:j + 1], j - i))
    if good[-1] != len(ks) - 1:
        blocks.append((gs[good[-1]:], vs[good[-1]:], len(ks) - 1 - good[-1]))
    return blocks


def _collect_brackets(lo: float, hi: float, precision_bits: int):
    ks, gs, vs = _good_grid(lo, hi)
    brackets = []
    for pts, vals, need in _blocks_from_grid(ks, gs, vs):
        brackets.extend(_scan_block(pts, vals, need, precision_bits))
    brackets.sort(key=lambda br: br[0])
    return brackets


def _refine_chunk(args):
    brackets, target_radius, precision_bits = args
    receipts: Dict[bytes, int] = {}
    out = []
    for a, b, sa, sb in brackets:
        out.append(_refine_bracket(a, b, sa, sb, target_radius,
                                   precision_bits, receipts))
    return out, receipts


def locate_and_refine(t_lo, t_hi, target_radius: float = 1e-12,
                      precision_bits: int = 96, workers: int = 1,
                      receipts: Optional[Dict[bytes, int]] = None
                      ) -> List[ZeroOrdinate]:
    """Locate every sign change of Z in (t_lo, t_hi] and refine each to a
    certified enclosure of radius <= target_radius.

    Workers > 1 shard the refinement over bracket chunks; the result is
    bit-identical to the serial run because every bracket's computation is
    independent and deterministic.  ``receipts`` (optional) collects the
    certified endpoint signs for reuse by the completeness certifier.
    """
    t_lo, t_hi = float(t_lo), float(t_hi)
    if not 2.0 < t_lo < t_hi:
        raise DomainError(
            f"need 2 < t_lo < t_hi, got ({t_lo!r}, {t_hi!r})")
    if not 0.0 < target_radius <= 1e-3:
        raise DomainError("target_radius must be in (0, 1e-3]")
    if t_hi <= _SCAN_FLOOR:
        return []
    lo = max(t_lo, _SCAN_FLOOR)
    brackets = _collect_brackets(lo, t_hi, precision_bits)
    # refine only brackets that can intersect the requested window
    brackets = [br for br in brackets if br[1] > t_lo and br[0] <= t_hi + 1e-6]

    if workers <= 1 or len(brackets) < 4:
        enclosures, rec = _refine_chunk((brackets, target_radius, precision_bits))
    else:
        chunks = []
        step = (len(brackets) + workers - 1) // workers
        for i in range(0, len(brackets), step):
            chunks.append((brackets[i:i + step], target_radius, precision_bits))
        enclosures = []
        rec: Dict[bytes, int] = {}
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for encs, r in pool.map(_refine_chunk, chunks):
                enclosures.extend(encs)
                rec.update(r)
    if receipts is not None:
        receipts.update(rec)

    out = []
    for enc in enclosures:
        mid = float(enc.midpoint)
        if t_lo < mid <= t_hi:
            out.append(ZeroOrdinate(None, enc))
    # locating the same zero twice would break everything downstream
    for prev, cur in zip(out, out[1:]):
        if not cur.gamma.lower() > prev.gamma.upper():
            raise RefinementError(
                "two refined enclosures overlap near "
                f"{float(cur.gamma.midpoint):.9f}; scan produced a duplicate "
                "bracket")
    return out
