"""Exact dyadic-rational and grid-interval arithmetic.

Every decision in the refinement construction reduces to comparisons of
unbounded integers. Floating point never appears in this module; values are
canonicalized after each operation so equality is structural.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import budget


def ceil_log2(x: int) -> int:
    """Smallest e with 2**e >= x, for x >= 1."""
    if x < 1:
        raise ValueError(f"ceil_log2 needs x >= 1, got {x}")
    return (x - 1).bit_length()


def ceil_div(a: int, b: int) -> int:
    return -(-a // b)


@dataclass(frozen=True)
class DyadicRational:
    """numerator / 2**scale in [0, 1); canonical form has numerator odd or scale 0."""

    numerator: int
    scale: int

    def __post_init__(self):
        num, s = self.numerator, self.scale
        if s < 0 or num < 0 or num >> s:
            raise ValueError(f"not a unit-interval dyadic: {num}/2^{s}")
        if num == 0:
            s = 0
        else:
            drop = (num & -num).bit_length() - 1
            num >>= drop
            s -= drop
        object.__setattr__(self, "numerator", num)
        object.__setattr__(self, "scale", s)

    def as_fraction(self) -> Fraction:
        return Fraction(self.numerator, 1 << self.scale)

    def __float__(self) -> float:
        return self.numerator / (1 << self.scale)

    def _cmp_key(self, other: "DyadicRational"):
        # a/2^s vs c/2^t  <=>  a*2^t vs c*2^s
        return self.numerator << other.scale, other.numerator << self.scale

    def __lt__(self, other):
        a, b = self._cmp_key(other)
        return a < b

    def __le__(self, other):
        a, b = self._cmp_key(other)
        return a <= b

    def __repr__(self):
        return f"DyadicRational({self.numerator}, {self.scale})"


DYADIC_ZERO = DyadicRational(0, 0)


@dataclass(frozen=True)
class DyadicInterval:
    """[index * 2**-scale, (index + 1) * 2**-scale), a half-open binary cell."""

    index: int
    scale: int

    def __post_init__(self):
        if self.scale < 0 or self.index < 0 or self.index >> self.scale:
            raise ValueError(f"bad dyadic interval: [{self.index}]/2^{self.scale}")

    @property
    def width(self) -> Fraction:
        return Fraction(1, 1 << self.scale)

    def lo(self) -> Fraction:
        return Fraction(self.index, 1 << self.scale)

    def hi(self) -> Fraction:
        return Fraction(self.index + 1, 1 << self.scale)

    def contains_point(self, x: DyadicRational) -> bool:
        # index/2^scale <= num/2^s < (index+1)/2^scale, cross-multiplied
        lhs = self.index << x.scale
        mid = x.numerator << self.scale
        return lhs <= mid < lhs + (1 << x.scale)

    def contains_interval(self, other: "DyadicInterval") -> bool:
        if other.scale < self.scale:
            return False
        shift = other.scale - self.scale
        return (other.index >> shift) == self.index

    def subinterval(self, offset: int, scale: int) -> "DyadicInterval":
        """The offset-th child when refined to the given finer scale."""
        if scale < self.scale:
            raise ValueError("subinterval scale must refine the parent scale")
        return DyadicInterval((self.index << (scale - self.scale)) + offset, scale)


@dataclass(frozen=True)
class BaseGridInterval:
    """[cell * base**-depth, (cell + 1) * base**-depth), a half-open base-b cell."""

    base: int
    cell: int
    depth: int

    def __post_init__(self):
        if self.base < 2:
            raise ValueError(f"base must be >= 2, got {self.base}")
        if self.depth < 1:
            raise ValueError(f"depth must be >= 1, got {self.depth}")
        budget.check_bits(self.depth * self.base.bit_length(), "grid cell bound")
        if not 0 <= self.cell < self.base**self.depth:
            raise ValueError(f"cell {self.cell} out of range for depth {self.depth}")

    def lo(self) -> Fraction:
        return Fraction(self.cell, self.base**self.depth)

    def hi(self) -> Fraction:
        return Fraction(self.cell + 1, self.base**self.depth)

    def dyadic_inside(self, near_middle: bool = False) -> DyadicRational:
        """A dyadic point inside this cell, at the smallest adequate scale.

        With near_middle the point is taken just past the cell midpoint, which
        gives a second, distinct representative for constancy checks.
        """
        q = self.base**self.depth
        if near_middle:
            s = (2 * q).bit_length() + 1
            num = ceil_div((2 * self.cell + 1) << s, 2 * q)
        else:
            s = q.bit_length()
            num = ceil_div(self.cell << s, q)
        return DyadicRational(num, s)


def frac_pow(x: DyadicRational, b: int, j: int) -> DyadicRational:
    """Fractional part of b**j * x, exactly: (b**j * num mod 2**scale) / 2**scale."""
    if b < 2:
        raise ValueError(f"base must be >= 2, got {b}")
    if j < 0:
        raise ValueError(f"exponent must be >= 0, got {j}")
    budget.check_bits(2 * x.scale + b.bit_length(), "fractional-part working set")
    m = 1 << x.scale
    return DyadicRational((pow(b, j, m) * x.numerator) % m, x.scale)


def in_cell(y: DyadicRational, g: BaseGridInterval) -> bool:
    """Whether y lies in g, decided by integer cross-multiplication only."""
    p = g.base**g.depth
    lhs = g.cell << y.scale
    mid = p * y.numerator
    return lhs <= mid < lhs + (1 << y.scale)


def least_power_exponent(base: int, target: int) -> int:
    """Smallest e >= 0 with base**e >= target, by binary search on powers."""
    if base < 2:
        raise ValueError(f"base must be >= 2, got {base}")
    if target <= 1:
        return 0
    hi = ceil_log2(target)  # base >= 2, so base**ceil_log2(target) >= target
    lo = 1
    while lo < hi:
        mid = (lo + hi) // 2
        if base**mid >= target:
            hi = mid
        else:
            lo = mid + 1
    return lo


def ceil_pow_log_ratio(k: int, b: int) -> int:
    """Smallest N with b**N >= 2**(2**k), i.e. the ceiling of 2**k * log 2 / log b.

    Power-of-two bases tie exactly; b == 2 returns 2**k without materializing
    the doubly exponential comparison target.
    """
    if k < 0:
        raise ValueError(f"k must be >= 0, got {k}")
    if b < 2:
        raise ValueError(f"base must be >= 2, got {b}")
    if b == 2:
        return 1 << k
    budget.check_bits((1 << k) + 1, f"power comparison target 2^(2^{k})")
    return least_power_exponent(b, 1 << (1 << k))


def representative(d: DyadicInterval) -> DyadicRational:
    """Left endpoint of d in canonical form."""
    return DyadicRational(d.index, d.scale)
