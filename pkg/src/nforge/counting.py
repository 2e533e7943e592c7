"""Orbit counting and exact discrepancy.

The measurement layer: windowed counts of orbit points falling in a band,
the extreme discrepancy of a finite point set (sorted-points formula), and a
brute-force oracle that recomputes the same supremum by enumerating candidate
bands. All arithmetic is exact; floats appear only when callers format
reports.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Iterable, Sequence

from . import budget
from .dyadic import DyadicRational, ceil_div, frac_pow
from .errors import BudgetExceededError


@dataclass(frozen=True)
class CountWindow:
    """Orbit indices j with start <= j < start + length."""

    start: int
    length: int

    def __post_init__(self):
        if self.start < 0 or self.length < 0:
            raise ValueError(f"window must be nonnegative: {self}")


@dataclass(frozen=True)
class RationalBand:
    """Half-open band [lo, hi) with exact rational endpoints in [0, 1]."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        if not (0 <= self.lo < self.hi <= 1):
            raise ValueError(f"band endpoints must satisfy 0 <= lo < hi <= 1: {self}")

    @property
    def length(self) -> Fraction:
        return self.hi - self.lo


def orbit_numerators(x: DyadicRational, b: int, window: CountWindow) -> list[int]:
    """Numerators of {b**j x} at x's scale, for j in the window."""
    if b < 2:
        raise ValueError(f"base must be >= 2, got {b}")
    budget.check_window(window.start + window.length, "orbit")
    budget.check_bits(2 * x.scale + b.bit_length(), "orbit working set")
    mask = (1 << x.scale) - 1
    y = (pow(b, window.start, mask + 1) * x.numerator) & mask
    out = []
    for _ in range(window.length):
        out.append(y)
        y = (y * b) & mask
    return out


def orbit(x: DyadicRational, b: int, window: CountWindow) -> list[DyadicRational]:
    """The orbit points {b**j x} for j in the window, canonicalized."""
    return [DyadicRational(num, x.scale) for num in orbit_numerators(x, b, window)]


def band_hits(x: DyadicRational, b: int, window: CountWindow, band: RationalBand) -> int:
    """How many orbit points in the window fall inside the band."""
    s = x.scale
    # num/2^s in [lo, hi)  <=>  ceil(lo * 2^s) <= num < ceil(hi * 2^s)
    lo_i = ceil_div(band.lo.numerator << s, band.lo.denominator)
    hi_i = ceil_div(band.hi.numerator << s, band.hi.denominator)
    return sum(1 for num in orbit_numerators(x, b, window) if lo_i <= num < hi_i)


def count_deviation(
    x: DyadicRational, b: int, window: CountWindow, band: RationalBand
) -> Fraction:
    """|#{j in window : {b**j x} in band} - band.length * window.length|, exact."""
    if window.length == 0:
        return Fraction(0)
    hits = band_hits(x, b, window, band)
    return abs(Fraction(hits) - band.length * window.length)


def shift_check(
    x: DyadicRational, b: int, start: int, length: int, band: RationalBand
) -> bool:
    """Self-test of the window-shift identity: a count over a delayed window
    equals the count over the initial window of the shifted point."""
    lhs = count_deviation(x, b, CountWindow(start, length), band)
    rhs = count_deviation(frac_pow(x, b, start), b, CountWindow(0, length), band)
    return lhs == rhs


def _to_num_den(p) -> tuple[int, int]:
    if isinstance(p, DyadicRational):
        return p.numerator, 1 << p.scale
    f = Fraction(p)
    if not 0 <= f < 1:
        raise ValueError(f"points must lie in [0, 1), got {f}")
    return f.numerator, f.denominator


def _common_numerators(points: Iterable) -> tuple[list[int], int]:
    pairs = [_to_num_den(p) for p in points]
    if not pairs:
        raise ValueError("discrepancy of an empty point set is undefined")
    den = 1
    for _, d in pairs:
        den = lcm(den, d)
    return [n * (den // d) for n, d in pairs], den


def discrepancy_scaled(nums: Sequence[int], den: int) -> Fraction:
    """Extreme discrepancy of the multiset {nums[i] / den}, sorted-points formula.

    For sorted values x_(1) <= ... <= x_(N) the supremum over half-open bands
    equals 1/N + max_i(i/N - x_(i)) - min_i(i/N - x_(i)).
    """
    n = len(nums)
    ordered = sorted(nums)
    terms = [(i + 1) * den - n * q for i, q in enumerate(ordered)]
    return Fraction(den + max(terms) - min(terms), n * den)


def discrepancy_exact(points: Iterable) -> Fraction:
    """Extreme discrepancy of a finite point multiset in [0, 1), exact."""
    nums, den = _common_numerators(points)
    return discrepancy_scaled(nums, den)


def discrepancy_oracle(points: Iterable) -> Fraction:
    """Brute-force supremum over candidate bands.

    Candidate endpoints are the point values and their one-sided limits (a
    band edge sitting exactly on a value, or just past it), plus 0 and 1.
    The limit bands keep the limiting length, so the result is the exact
    supremum rather than an approximation. Independent of the sorted-points
    formula used by discrepancy_exact.
    """
    nums, den = _common_numerators(points)
    n = len(nums)
    if n > budget.active().oracle_points:
        raise BudgetExceededError(
            f"oracle capped at {budget.active().oracle_points} points, got {n}"
        )
    ordered = sorted(set(nums))
    all_sorted = sorted(nums)

    def below(v: int) -> int:
        return bisect.bisect_left(all_sorted, v)

    def at_most(v: int) -> int:
        return bisect.bisect_right(all_sorted, v)

    # (value, side): side 0 = edge on the value, side 1 = edge just above it
    left_edges = [(0, 0)] + [(v, s) for v in ordered for s in (0, 1)]
    right_edges = [(v, s) for v in ordered for s in (0, 1)] + [(den, 0)]

    best = 0  # numerator of |count/n - length| over denominator n*den
    for v, sv in left_edges:
        excluded = below(v) if sv == 0 else at_most(v)
        for w, sw in right_edges:
            if w < v or (w == v and not (sv == 0 and sw == 1)):
                continue
            included = below(w) if sw == 0 else at_most(w)
            count = included - excluded
            value = abs(count * den - n * (w - v))
            if value > best:
                best = value
    return Fraction(best, n * den)
