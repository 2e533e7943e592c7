"""Exact dyadic arithmetic: canonical forms, fractional parts, grid membership."""

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nforge import budget
from nforge.dyadic import (
    BaseGridInterval,
    DyadicInterval,
    DyadicRational,
    ceil_log2,
    ceil_pow_log_ratio,
    frac_pow,
    in_cell,
    least_power_exponent,
    representative,
)
from nforge.errors import BudgetExceededError


def dy(num, scale):
    return DyadicRational(num, scale)


class TestDyadicRational:
    def test_canonicalization(self):
        assert dy(6, 3) == dy(3, 2)
        assert dy(4, 3) == dy(1, 1)
        assert dy(0, 17) == dy(0, 0)
        assert dy(5, 3).numerator == 5 and dy(5, 3).scale == 3

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            dy(8, 3)  # 8/8 = 1 is outside [0, 1)
        with pytest.raises(ValueError):
            dy(-1, 3)

    def test_ordering(self):
        assert dy(1, 2) < dy(1, 1)
        assert dy(3, 2) <= dy(3, 2)
        assert not dy(1, 1) < dy(1, 2)

    @given(st.integers(0, 2**40 - 1), st.integers(0, 40))
    def test_canonical_invariant(self, num, scale):
        num %= 1 << scale
        x = dy(num, scale)
        assert x.numerator % 2 == 1 or x.scale == 0
        assert x.as_fraction() == Fraction(num, 1 << scale)


class TestFracPow:
    @pytest.mark.parametrize(
        "x,b,j,expected",
        [
            (dy(3, 3), 2, 1, Fraction(3, 4)),
            (dy(3, 3), 3, 1, Fraction(1, 8)),
            (dy(5, 4), 3, 2, Fraction(13, 16)),
            (dy(0, 0), 7, 12, Fraction(0)),
        ],
    )
    def test_examples(self, x, b, j, expected):
        assert frac_pow(x, b, j).as_fraction() == expected

    @given(
        st.integers(0, 2**24 - 1),
        st.integers(2, 7),
        st.integers(0, 12),
        st.integers(0, 12),
    )
    @settings(max_examples=200)
    def test_composition(self, num, b, j1, j2):
        x = dy(num % (1 << 24), 24)
        assert frac_pow(frac_pow(x, b, j1), b, j2) == frac_pow(x, b, j1 + j2)

    def test_matches_fraction_oracle(self):
        rng = random.Random(401)
        for _ in range(500):
            scale = rng.randrange(1, 20)
            num = rng.randrange(1 << scale)
            b = rng.randrange(2, 8)
            j = rng.randrange(0, 9)
            got = frac_pow(dy(num, scale), b, j).as_fraction()
            whole = Fraction(num, 1 << scale) * b**j
            assert got == whole - int(whole)

    def test_budget_cap(self):
        with budget.limited(bits=64):
            with pytest.raises(BudgetExceededError):
                frac_pow(dy(1, 100), 3, 5)


class TestInCell:
    def test_examples(self):
        g = BaseGridInterval(3, 1, 1)  # [1/3, 2/3)
        assert not in_cell(dy(1, 2), g)
        assert in_cell(dy(1, 1), g)
        assert not in_cell(dy(5, 4), g)  # 3*5 = 15 < 16

    def test_agrees_with_rational_oracle(self):
        rng = random.Random(402)
        for _ in range(10_000):
            scale = rng.randrange(0, 16)
            num = rng.randrange(1 << scale) if scale else 0
            b = rng.randrange(2, 6)
            depth = rng.randrange(1, 5)
            cell = rng.randrange(b**depth)
            y = dy(num, scale)
            g = BaseGridInterval(b, cell, depth)
            want = g.lo() <= y.as_fraction() < g.hi()
            assert in_cell(y, g) == want


class TestCeilPowLogRatio:
    @pytest.mark.parametrize("k", [0, 3, 11, 64])
    def test_base_two_is_exact(self, k):
        assert ceil_pow_log_ratio(k, 2) == 1 << k

    def test_examples(self):
        assert ceil_pow_log_ratio(7, 3) == 81
        assert ceil_pow_log_ratio(4, 5) == 7

    @pytest.mark.parametrize("k", range(0, 14))
    @pytest.mark.parametrize("b", [2, 3, 4, 5, 6, 10])
    def test_bracketing(self, k, b):
        n = ceil_pow_log_ratio(k, b)
        target = 1 << (1 << k)
        assert b**n >= target
        assert n == 0 or b ** (n - 1) < target

    def test_budget_cap(self):
        with budget.limited(bits=1 << 16):
            with pytest.raises(BudgetExceededError):
                ceil_pow_log_ratio(40, 3)

    def test_least_power_exponent(self):
        assert least_power_exponent(4, 1) == 0
        assert least_power_exponent(4, 2) == 1
        assert least_power_exponent(9, 1 << 19) == 6  # 9^5 < 2^19 <= 9^6


class TestIntervals:
    def test_representative(self):
        assert representative(DyadicInterval(0, 0)) == dy(0, 0)
        assert representative(DyadicInterval(5, 3)) == dy(5, 3)
        assert representative(DyadicInterval(6, 3)) == dy(3, 2)

    def test_containment(self):
        outer = DyadicInterval(1, 1)  # [1/2, 1)
        assert outer.contains_interval(DyadicInterval(2, 2))
        assert not outer.contains_interval(DyadicInterval(1, 2))
        assert outer.contains_point(dy(1, 1))
        assert not outer.contains_point(dy(1, 2))

    def test_subinterval(self):
        child = DyadicInterval(1, 1).subinterval(3, 4)
        assert child == DyadicInterval(11, 4)
        assert DyadicInterval(1, 1).contains_interval(child)

    @given(st.integers(2, 5), st.integers(1, 6), st.data())
    @settings(max_examples=150)
    def test_grid_interior_points(self, b, depth, data):
        cell = data.draw(st.integers(0, b**depth - 1))
        g = BaseGridInterval(b, cell, depth)
        for near_middle in (False, True):
            point = g.dyadic_inside(near_middle=near_middle)
            assert g.lo() <= point.as_fraction() < g.hi()
        assert ceil_log2(b**depth) >= depth  # interior scale is adequate
