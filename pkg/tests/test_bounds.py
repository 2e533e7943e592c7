"""Closed-form bounds, threshold decisions, block decompositions, covers."""

import math
import random
from fractions import Fraction

import mpmath
import pytest

from nforge.bounds import (
    BoundParams,
    DISCREPANCY_ADDENDS,
    bernstein_bound,
    check_h5_domination,
    deviation_exceeds_threshold,
    deviation_measure_bound,
    discrepancy_constant,
    dyadic_blocks,
    eps_criterion,
    fukuyama_constant,
    mpf_to_fraction,
    occupied_blocks,
    prefix_cover,
    relative_deviation_bound,
    simplified_deviation_bound,
)
from nforge.errors import CriterionViolatedError


def as_float(x):
    return float(x)


class TestBernstein:
    def test_frozen_value(self):
        # 2 exp(-1 / (1/2 + 1/3)) = 2 e^(-6/5); frozen from mpmath evaluation
        got = as_float(bernstein_bound(4, Fraction(1, 4), Fraction(1)))
        assert got == pytest.approx(0.6023884238244042, abs=1e-12)

    def test_zero_eps(self):
        assert as_float(bernstein_bound(1, Fraction(1), Fraction(0))) == pytest.approx(2.0)

    def test_monotone_decay(self):
        values = [
            as_float(bernstein_bound(1, Fraction(1), Fraction(e))) for e in range(0, 40, 4)
        ]
        assert all(a > b for a, b in zip(values, values[1:]))
        assert values[-1] < 1e-6


class TestDeviationMeasureBound:
    def test_unit_depth(self):
        p = BoundParams(b=2, h=1, N=4, eps=Fraction(1))
        assert as_float(deviation_measure_bound(p)) == pytest.approx(
            float(2 * mpmath.exp(Fraction(-6, 5))), rel=1e-12
        )

    def test_depth_two(self):
        # denominator 2*(1/4)*(3/4) + (2/3)/sqrt(2), leading factor 2h = 4
        p = BoundParams(b=2, h=2, N=4, eps=Fraction(1))
        denom = 2 * 0.25 * 0.75 + (2 / 3) / math.sqrt(2)
        assert as_float(deviation_measure_bound(p)) == pytest.approx(
            4 * math.exp(-1 / denom), rel=1e-9
        )

    def test_huge_eps_vanishes(self):
        p = BoundParams(b=2, h=1, N=4, eps=Fraction(60))
        assert as_float(deviation_measure_bound(p)) < 1e-12

    def test_window_precondition(self):
        with pytest.raises(ValueError):
            deviation_measure_bound(BoundParams(b=2, h=3, N=2, eps=Fraction(1)))

    def test_rounding_direction(self):
        p = BoundParams(b=2, h=1, N=4, eps=Fraction(1))
        up = mpf_to_fraction(deviation_measure_bound(p, up=True))
        down = mpf_to_fraction(deviation_measure_bound(p, up=False))
        assert down < up


class TestRelativeBound:
    def test_frozen_value(self):
        p = BoundParams(b=2, h=1, N=4, eps=Fraction(1), j0=3, mu_a=Fraction(1, 2))
        assert as_float(relative_deviation_bound(p)) == pytest.approx(
            0.5 * 0.6023884238244042 + 0.25, rel=1e-9
        )

    def test_mass_zero_leaves_tail(self):
        p = BoundParams(b=2, h=1, N=4, eps=Fraction(1), j0=20, mu_a=Fraction(0))
        assert as_float(relative_deviation_bound(p)) == pytest.approx(2 * 2**-20, rel=1e-6)


class TestEpsCriterion:
    def test_examples(self):
        assert eps_criterion(BoundParams(b=2, h=1, N=4, eps=Fraction(1)))
        assert not eps_criterion(BoundParams(b=2, h=1, N=4, eps=Fraction(2)))
        assert eps_criterion(BoundParams(b=5, h=1, N=1000, eps=Fraction(1, 1000)))

    def test_boundary_exactness(self):
        # (2/3) eps / sqrt(4) <= 1/2  <=>  eps <= 3/2 exactly at N=4, h=1, b=2
        assert eps_criterion(BoundParams(b=2, h=1, N=4, eps=Fraction(3, 2)))
        assert not eps_criterion(BoundParams(b=2, h=1, N=4, eps=Fraction(3, 2) + Fraction(1, 10**9)))


class TestSimplifiedBound:
    def test_requires_criterion(self):
        with pytest.raises(CriterionViolatedError):
            simplified_deviation_bound(BoundParams(b=2, h=1, N=4, eps=Fraction(2)))

    def test_frozen_value(self):
        # 2 exp(-(1/16) * 2 / 529) + 2 * 2^-10, evaluated directly
        p = BoundParams(b=2, h=1, N=400, eps=Fraction(1, 4), j0=10, mu_a=Fraction(1))
        want = 2 * math.exp(-(1 / 16) * 2 / 529) + 2 * 2**-10
        assert as_float(simplified_deviation_bound(p)) == pytest.approx(want, rel=1e-9)

    def test_dominates_sharp_bound(self):
        rng = random.Random(407)
        tried = 0
        while tried < 60:
            b = rng.randrange(2, 6)
            h = rng.randrange(1, 4)
            N = rng.randrange(h, 4000)
            eps = Fraction(rng.randrange(1, 50), rng.randrange(50, 400))
            p = BoundParams(b=b, h=h, N=N, eps=eps, j0=rng.randrange(1, 8))
            if not eps_criterion(p):
                continue
            tried += 1
            lo = mpf_to_fraction(simplified_deviation_bound(p, up=False))
            hi = mpf_to_fraction(relative_deviation_bound(p, up=True))
            assert lo >= hi

    def test_exponent_shrinks_with_depth(self):
        # larger h with fixed eps decreases the exponential's argument magnitude
        args = [Fraction(1, 8) ** 2 * 2 * h**5 / 529 for h in (1, 2, 3)]
        assert args[0] < args[1] < args[2]


class TestH5Domination:
    def test_small_cases(self):
        assert 528 * 2 >= 4 * 1  # h = 1
        assert 528 * 4 >= 4 * 32  # h = 2
        assert check_h5_domination(1)
        assert check_h5_domination(64)

    def test_tightest_point(self):
        # h = 7 is the closest call: 528 * 128 = 67584 vs 4 * 7^5 = 67228
        assert 528 * 2**7 - 4 * 7**5 == 356


class TestThresholdDecision:
    def test_zero_deviation(self):
        assert not deviation_exceeds_threshold(8, 2, 1, 5, 5, Fraction(1))

    def test_large_constant_blocks_everything(self):
        # window length 16, worst deviation 8, threshold 46 * 4 * sqrt(2)
        assert all(
            not deviation_exceeds_threshold(c, 2, 1, 5, 6, Fraction(46)) for c in range(17)
        )

    def test_unit_constant_trips(self):
        assert deviation_exceeds_threshold(16, 2, 1, 5, 5, Fraction(1))

    def test_agrees_with_high_precision_floats(self):
        rng = random.Random(408)
        with mpmath.workprec(256):
            for _ in range(10_000):
                b = rng.randrange(2, 6)
                h = rng.randrange(1, 4)
                n = rng.randrange(1, 12)
                level = rng.randrange(1, n + 1)
                count = rng.randrange(0, (1 << (level - 1)) + 1)
                thr = Fraction(rng.randrange(0, 64), rng.randrange(1, 16))
                got = deviation_exceeds_threshold(count, b, h, level, n, thr)
                f = abs(mpmath.mpf(count) - mpmath.mpf(2) ** (level - 1) / b**h)
                cutoff = (
                    mpmath.mpf(thr.numerator)
                    / thr.denominator
                    * mpmath.mpf(2) ** (mpmath.mpf(level - 1) / 2)
                    * mpmath.mpf(h) ** mpmath.mpf(-1.5)
                    * mpmath.sqrt(n - level + 1)
                )
                assert got == (f > cutoff)


class TestDyadicBlocks:
    def test_examples(self):
        five = {(blk.level, blk.offset) for blk in occupied_blocks(5)}
        assert five == {(3, 0), (1, 2)}
        assert {(blk.level, blk.offset) for blk in occupied_blocks(4)} == {(3, 0)}
        seven = [(blk.level, blk.offset, blk.start, blk.stop) for blk in occupied_blocks(7)]
        assert seven == [(3, 0, 0, 4), (2, 1, 4, 6), (1, 3, 6, 7)]

    def test_placeholders_present(self):
        levels = [blk.level for blk in dyadic_blocks(5)]
        assert levels == [3, 2, 1]

    @pytest.mark.parametrize("N", [1, 2, 3, 64, 100, 1023, 1024])
    def test_tiling(self, N):
        spans = sorted((blk.start, blk.stop) for blk in occupied_blocks(N))
        pos = 0
        for start, stop in spans:
            assert start == pos
            pos = stop
        assert pos == N
        for blk in dyadic_blocks(N):
            assert blk.start + (1 << (blk.level - 1)) <= N


class TestPrefixCover:
    def test_examples(self):
        assert [(c.cell, c.depth) for c in prefix_cover(Fraction(1, 2), 2, 1)] == [(0, 1)]
        cells = prefix_cover(Fraction(3, 4), 2, 2)
        assert [(c.lo(), c.hi()) for c in cells] == [
            (Fraction(0), Fraction(1, 2)),
            (Fraction(1, 2), Fraction(3, 4)),
        ]
        cells = prefix_cover(Fraction(5, 9), 3, 2)
        assert [(c.lo(), c.hi()) for c in cells] == [
            (Fraction(0), Fraction(1, 3)),
            (Fraction(1, 3), Fraction(4, 9)),
            (Fraction(4, 9), Fraction(5, 9)),
        ]

    def test_properties_on_random_alphas(self):
        rng = random.Random(409)
        for _ in range(200):
            b = rng.randrange(2, 6)
            depth = rng.randrange(1, 6)
            alpha = Fraction(rng.randrange(1, 240), 240)
            if alpha >= 1:
                continue
            cells = prefix_cover(alpha, b, depth)
            spans = sorted((c.lo(), c.hi()) for c in cells)
            pos = Fraction(0)
            for lo, hi in spans:
                assert lo == pos  # disjoint and contiguous from 0
                pos = hi
            assert pos <= alpha
            assert alpha - pos < Fraction(1, b**depth)
            for t in range(1, depth + 1):
                assert sum(1 for c in cells if c.depth == t) <= b - 1


class TestConstants:
    def test_fukuyama_base_two(self):
        want = mpmath.sqrt(84) / 9
        assert abs(fukuyama_constant(2) - want) < 1e-30

    def test_fukuyama_odd_is_exact(self):
        assert fukuyama_constant(3) == 1

    def test_fukuyama_even(self):
        assert float(fukuyama_constant(4)) == pytest.approx(math.sqrt(20 / 27), rel=1e-12)

    def test_discrepancy_constant(self):
        assert sum(DISCREPANCY_ADDENDS) == 3433
        assert discrepancy_constant(2) == 6866
        assert discrepancy_constant(3) == 10299
