"""Counting layer: windowed deviations, shift identity, exact discrepancy."""

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nforge import budget
from nforge.counting import (
    CountWindow,
    RationalBand,
    band_hits,
    count_deviation,
    discrepancy_exact,
    discrepancy_oracle,
    orbit,
    shift_check,
)
from nforge.dyadic import DyadicRational
from nforge.errors import BudgetExceededError


def dy(num, scale):
    return DyadicRational(num, scale)


def band(lo, hi):
    return RationalBand(Fraction(lo), Fraction(hi))


class TestCountDeviation:
    def test_orbit_example(self):
        # orbit of 1/16 under doubling: 1/16, 1/8, 1/4, 1/2; three in [0, 1/2)
        got = count_deviation(dy(1, 4), 2, CountWindow(0, 4), band(0, Fraction(1, 2)))
        assert got == 1

    def test_full_band_is_zero(self):
        rng = random.Random(403)
        for _ in range(50):
            x = dy(rng.randrange(1 << 12), 12)
            b = rng.randrange(2, 6)
            w = CountWindow(rng.randrange(4), rng.randrange(12))
            assert count_deviation(x, b, w, band(0, 1)) == 0

    def test_empty_window_is_zero(self):
        assert count_deviation(dy(3, 3), 5, CountWindow(7, 0), band(0, Fraction(1, 3))) == 0

    def test_window_cap(self):
        with budget.limited(window=16):
            with pytest.raises(BudgetExceededError):
                count_deviation(dy(1, 4), 2, CountWindow(0, 64), band(0, 1))


class TestShiftIdentity:
    def test_examples(self):
        assert shift_check(dy(3, 3), 2, 1, 2, band(0, Fraction(1, 2)))
        assert shift_check(dy(5, 4), 3, 2, 3, band(Fraction(1, 3), Fraction(2, 3)))
        assert shift_check(dy(5, 4), 3, 0, 3, band(Fraction(1, 3), Fraction(2, 3)))

    def test_seeded_sweep(self):
        rng = random.Random(404)
        for _ in range(300):
            scale = rng.randrange(1, 40)
            x = dy(rng.randrange(1 << scale), scale)
            b = rng.randrange(2, 6)
            start = rng.randrange(0, 32)
            length = rng.randrange(0, 33 - min(start, 32))
            lo_n = rng.randrange(8)
            hi_n = rng.randrange(lo_n + 1, 9)
            assert shift_check(
                x, b, start, length, RationalBand(Fraction(lo_n, 8), Fraction(hi_n, 8))
            )


class TestOrbit:
    def test_examples(self):
        assert [p.as_fraction() for p in orbit(dy(1, 4), 2, CountWindow(0, 4))] == [
            Fraction(1, 16),
            Fraction(1, 8),
            Fraction(1, 4),
            Fraction(1, 2),
        ]
        assert all(p == dy(0, 0) for p in orbit(dy(0, 0), 3, CountWindow(2, 5)))
        assert [p.as_fraction() for p in orbit(dy(5, 4), 3, CountWindow(0, 3))] == [
            Fraction(5, 16),
            Fraction(15, 16),
            Fraction(13, 16),
        ]


class TestDiscrepancy:
    def test_point_at_zero(self):
        assert discrepancy_exact([Fraction(0)]) == 1
        assert discrepancy_oracle([Fraction(0)]) == 1

    def test_centered_points(self):
        for n in (1, 2, 4, 7, 16):
            pts = [Fraction(2 * i - 1, 2 * n) for i in range(1, n + 1)]
            assert discrepancy_exact(pts) == Fraction(1, n)
            assert discrepancy_oracle(pts) == Fraction(1, n)

    def test_two_points(self):
        pts = [Fraction(0), Fraction(1, 2)]
        assert discrepancy_exact(pts) == Fraction(1, 2)
        assert discrepancy_oracle(pts) == Fraction(1, 2)

    def test_oracle_singletons(self):
        assert discrepancy_oracle([Fraction(1, 2)]) == 1
        grid = [Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(3, 4)]
        assert discrepancy_oracle(grid) == Fraction(1, 4)

    def test_empty_input(self):
        with pytest.raises(ValueError):
            discrepancy_exact([])
        with pytest.raises(ValueError):
            discrepancy_oracle([])

    def test_oracle_cap(self):
        with budget.limited(oracle_points=4):
            with pytest.raises(BudgetExceededError):
                discrepancy_oracle([Fraction(i, 16) for i in range(8)])

    def test_accepts_dyadic_rationals(self):
        pts = [dy(1, 2), dy(3, 2)]
        assert discrepancy_exact(pts) == discrepancy_exact([Fraction(1, 4), Fraction(3, 4)])

    def test_matches_oracle_on_random_sets(self):
        rng = random.Random(405)
        for _ in range(60):
            n = rng.randrange(1, 40)
            scale = rng.randrange(1, 9)
            pts = [Fraction(rng.randrange(1 << scale), 1 << scale) for _ in range(n)]
            assert discrepancy_exact(pts) == discrepancy_oracle(pts)

    @given(st.lists(st.integers(0, 63), min_size=1, max_size=24))
    @settings(max_examples=150, deadline=None)
    def test_range_and_oracle_property(self, nums):
        pts = [Fraction(v, 64) for v in nums]
        d = discrepancy_exact(pts)
        assert Fraction(1, len(pts)) <= d <= 1
        assert d == discrepancy_oracle(pts)


class TestTrivialBandBound:
    def test_anchored_bands_dominate(self):
        # any band's deviation is at most twice the worst anchored band's
        rng = random.Random(406)
        for _ in range(80):
            scale = rng.randrange(2, 12)
            x = dy(rng.randrange(1 << scale), scale)
            b = rng.randrange(2, 5)
            n = rng.randrange(1, 16)
            w = CountWindow(0, n)
            grid = 16
            lo_n = rng.randrange(grid - 1)
            hi_n = rng.randrange(lo_n + 1, grid + 1)
            lhs = count_deviation(
                x, b, w, RationalBand(Fraction(lo_n, grid), Fraction(hi_n, grid))
            )
            anchored = max(
                count_deviation(x, b, w, RationalBand(Fraction(0), Fraction(a, grid)))
                for a in range(1, grid + 1)
            )
            assert lhs <= 2 * anchored


class TestBandHits:
    def test_boundary_semantics(self):
        # half-open bands: the left endpoint counts, the right does not
        x = dy(1, 1)
        assert band_hits(x, 2, CountWindow(0, 1), band(Fraction(1, 2), 1)) == 1
        assert band_hits(x, 2, CountWindow(0, 1), band(0, Fraction(1, 2))) == 0
