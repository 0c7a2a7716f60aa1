"""Exact Bernoulli numbers as Fractions.

Computed by the defining recurrence sum_{j=0}^{m} C(m+1, j) B_j = 0 (m >= 1)
with B_1 = -1/2, entirely in rational arithmetic, so the Stirling and
Euler-Maclaurin remainder bounds built on them are exact.  Values are cached
and extended on demand; indices stay small (a few hundred), where the
recurrence is instant.
"""

from __future__ import annotations

from fractions import Fraction
from math import comb

_B: list[Fraction] = [Fraction(1), Fraction(-1, 2)]


def bernoulli(m: int) -> Fraction:
    """B_m with the B_1 = -1/2 convention; exact."""
    if m < 0:
        raise ValueError("Bernoulli index must be nonnegative")
    while len(_B) <= m:
        k = len(_B)
        if k % 2 == 1:
            _B.append(Fraction(0))
            continue
        s = sum(comb(k + 1, j) * _B[j] for j in range(k))
        _B.append(Fraction(-s, k + 1))
    return _B[m]
