"""Closed-form tail bounds and combinatorial decompositions.

Exact rational or integer comparisons wherever a decision is made
(threshold tests, criterion checks, block decompositions, grid covers).
Transcendental bound values are evaluated with mpmath at a configurable
precision (default 128-bit mantissa) and nudged in a caller-chosen
direction, so a reported upper bound never understates and a reported
lower bound never overstates.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import mpmath
from mpmath import mpf

from .dyadic import BaseGridInterval
from .errors import CriterionViolatedError

PRECISION_BITS = 128
_GUARD_BITS = 48  # working headroom over the requested precision
_MARGIN_SHIFT = 16  # directed nudge of 2**-(precision + 16), far above op error


@dataclass(frozen=True)
class BoundParams:
    """Shared parameter bundle for the deviation-measure bounds.

    b is the orbit base, h the band grid depth, N the window length, eps the
    deviation scale, j0 the window delay, mu_a the measure of the ambient
    subinterval.
    """

    b: int
    h: int
    N: int
    eps: Fraction
    j0: int = 1
    mu_a: Fraction = Fraction(1)

    def __post_init__(self):
        if self.b < 2 or self.h < 1 or self.N < 1:
            raise ValueError(f"need b >= 2, h >= 1, N >= 1: {self}")
        if self.eps <= 0:
            raise ValueError(f"eps must be positive: {self}")
        if self.j0 < 1:
            raise ValueError(f"j0 must be a positive integer: {self}")
        if not 0 <= self.mu_a <= 1:
            raise ValueError(f"mu_a must lie in [0, 1]: {self}")

    def require_window(self):
        if self.N < self.h:
            raise ValueError(f"window length N={self.N} must be >= depth h={self.h}")


def _exact(q: Fraction | int) -> mpf:
    f = Fraction(q)
    return mpf(f.numerator) / mpf(f.denominator)


def _nudged(value: mpf, up: bool, precision: int) -> mpf:
    bump = mpf(1) + mpf(2) ** (-(precision + _MARGIN_SHIFT))
    return value * bump if up else value / bump


def mpf_to_fraction(x: mpf) -> Fraction:
    """Exact rational value of a finite mpf."""
    sign, man, exp, _ = x._mpf_
    if man == 0 and exp != 0:
        raise ValueError(f"not a finite mpf: {x}")
    value = Fraction(man << exp) if exp >= 0 else Fraction(man, 1 << -exp)
    return -value if sign else value


def directed(value_fn, *, up: bool, precision: int = PRECISION_BITS) -> mpf:
    """Evaluate a positive mpmath expression with a directed safety nudge.

    The working precision carries guard bits and the result is scaled by
    1 +/- 2**-(precision + 16), which dwarfs the few-ulp rounding error of
    the underlying operations, so the returned value brackets the true one
    from the requested side.
    """
    with mpmath.workprec(precision + _GUARD_BITS):
        return _nudged(value_fn(), up, precision)


def bernstein_bound(
    n: int, variance: Fraction, eps: Fraction, *, precision: int = PRECISION_BITS, up: bool = True
) -> mpf:
    """Exponential tail bound 2 exp(-eps^2 / (2 sigma^2 + (2/3) eps n^(-1/2)))."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if not 0 <= variance <= 1:
        raise ValueError(f"variance must lie in [0, 1], got {variance}")
    if eps < 0:
        raise ValueError(f"eps must be >= 0, got {eps}")
    with mpmath.workprec(precision + _GUARD_BITS):
        denom = _exact(2 * variance) + _exact(Fraction(2, 3) * eps) / mpmath.sqrt(n)
        value = 2 * mpmath.exp(-_exact(eps) ** 2 / denom)
        return _nudged(value, up, precision)


def deviation_measure_bound(
    p: BoundParams, *, precision: int = PRECISION_BITS, up: bool = True
) -> mpf:
    """Measure bound 2h exp(-eps^2 / (2 b^-h (1 - b^-h) + (2/3) eps floor(N/h)^(-1/2)))."""
    p.require_window()
    bh = Fraction(1, p.b**p.h)
    with mpmath.workprec(precision + _GUARD_BITS):
        denom = _exact(2 * bh * (1 - bh)) + _exact(Fraction(2, 3) * p.eps) / mpmath.sqrt(
            p.N // p.h
        )
        value = 2 * p.h * mpmath.exp(-_exact(p.eps) ** 2 / denom)
        return _nudged(value, up, precision)


def relative_deviation_bound(
    p: BoundParams, *, precision: int = PRECISION_BITS, up: bool = True
) -> mpf:
    """The measure bound restricted to a subinterval of mass mu_a, plus the
    2 b^-j0 alignment loss of trimming that subinterval to grid endpoints."""
    with mpmath.workprec(precision + _GUARD_BITS):
        core = _exact(p.mu_a) * deviation_measure_bound(p, precision=precision, up=up)
        tail = _exact(Fraction(2, p.b**p.j0))
        return _nudged(core + tail, up, precision)


def eps_criterion(p: BoundParams) -> bool:
    """Exact test of (2/3) eps floor(N/h)^(-1/2) <= 1 / (b h^5), by squaring."""
    p.require_window()
    return 4 * p.eps**2 * p.b**2 * p.h**10 <= 9 * (p.N // p.h)


def simplified_deviation_bound(
    p: BoundParams, *, precision: int = PRECISION_BITS, up: bool = True
) -> mpf:
    """mu_a 2h exp(-eps^2 b h^5 / 529) + 2 b^-j0; valid only under eps_criterion."""
    if not eps_criterion(p):
        raise CriterionViolatedError(
            "simplified bound requested outside its eps criterion", params=p
        )
    with mpmath.workprec(precision + _GUARD_BITS):
        exponent = _exact(p.eps**2 * p.b * p.h**5 / Fraction(529))
        value = _exact(p.mu_a) * 2 * p.h * mpmath.exp(-exponent) + _exact(
            Fraction(2, p.b**p.j0)
        )
        return _nudged(value, up, precision)


def check_h5_domination(hmax: int) -> bool:
    """Exact check that 2^(2-h) <= 528 / h^5 for 1 <= h <= hmax."""
    if hmax < 1:
        raise ValueError(f"hmax must be >= 1, got {hmax}")
    return all(528 * (1 << h) >= 4 * h**5 for h in range(1, hmax + 1))


def deviation_exceeds_threshold(
    count: int, b: int, h: int, level: int, n: int, threshold: Fraction
) -> bool:
    """Exact decision of |count - 2^(level-1) b^-h| > c 2^((level-1)/2) h^(-3/2) sqrt(n - level + 1).

    Both sides are nonnegative, so the comparison squares exactly into
    integers; no precision tuning is involved.
    """
    if level > n:
        raise ValueError(f"level {level} exceeds n {n}")
    if count < 0 or threshold < 0:
        raise ValueError("count and threshold must be nonnegative")
    half = 1 << (level - 1)
    dev = count * b**h - half  # deviation scaled by b^h
    lhs = dev * dev * h**3 * threshold.denominator**2
    rhs = threshold.numerator**2 * half * (n - level + 1) * b ** (2 * h)
    return lhs > rhs


@dataclass(frozen=True)
class DyadicBlock:
    """Index block [offset * 2**level, offset * 2**level + 2**(level-1))."""

    level: int
    offset: int

    def __post_init__(self):
        if self.level < 1 or self.offset < 0:
            raise ValueError(f"bad block: {self}")

    @property
    def start(self) -> int:
        return self.offset << self.level

    @property
    def stop(self) -> int:
        return self.start + (1 << (self.level - 1))


def dyadic_blocks(N: int) -> list[DyadicBlock]:
    """Binary block decomposition of [0, N).

    Level L corresponds to binary digit L-1 of N (block length 2^(L-1)). Each
    set-digit block sits after all higher set digits, so set-digit blocks are
    disjoint and tile a prefix of [0, N). Unset levels get offset-0
    placeholder blocks; every block satisfies
    offset * 2^level + 2^(level-1) <= N.
    """
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    blocks = []
    consumed = 0
    for level in range(N.bit_length(), 0, -1):
        if N & (1 << (level - 1)):
            blocks.append(DyadicBlock(level, consumed >> level))
            consumed += 1 << (level - 1)
        else:
            blocks.append(DyadicBlock(level, 0))
    return blocks


def occupied_blocks(N: int) -> list[DyadicBlock]:
    """The set-digit blocks of dyadic_blocks(N), i.e. those that tile [0, N)."""
    return [blk for blk in dyadic_blocks(N) if N & (1 << (blk.level - 1))]


def prefix_cover(alpha: Fraction, b: int, depth: int) -> list[BaseGridInterval]:
    """Disjoint base-b grid cells covering [0, alpha) from its digit expansion.

    At most b-1 cells per depth 1..depth; the union stays inside [0, alpha)
    and misses less than b**-depth of it.
    """
    if not 0 < alpha < 1:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    if b < 2 or depth < 1:
        raise ValueError(f"need base >= 2 and depth >= 1, got {b}, {depth}")
    cells = []
    prefix = 0  # numerator of the covered prefix at the current depth
    rem = alpha
    for t in range(1, depth + 1):
        rem *= b
        digit = int(rem)
        rem -= digit
        prefix = prefix * b
        for i in range(digit):
            cells.append(BaseGridInterval(b, prefix + i, t))
        prefix += digit
    return cells


def fukuyama_constant(theta: int, *, precision: int = PRECISION_BITS) -> mpf:
    """Asymptotic constant for sqrt(N) D_N / sqrt(log log N) at integer theta.

    theta = 2 gives sqrt(84)/9; odd theta gives sqrt((theta+1)/(theta-1))/sqrt(2);
    even theta >= 4 gives sqrt((theta+1) theta (theta-2) / (theta-1)^3)/sqrt(2).
    """
    if theta < 2:
        raise ValueError(f"theta must be >= 2, got {theta}")
    if theta == 2:
        radicand = Fraction(84, 81)
    elif theta % 2 == 1:
        radicand = Fraction(theta + 1, 2 * (theta - 1))
    else:
        radicand = Fraction((theta + 1) * theta * (theta - 2), 2 * (theta - 1) ** 3)
    with mpmath.workprec(precision):
        return mpmath.sqrt(_exact(radicand))


DISCREPANCY_ADDENDS = (2, 2425, 1005, 1)


def discrepancy_constant(b: int) -> int:
    """The constant C with D_N <= C / sqrt(N) for the constructed number: 3433 b."""
    if b < 2:
        raise ValueError(f"base must be >= 2, got {b}")
    return sum(DISCREPANCY_ADDENDS) * b
