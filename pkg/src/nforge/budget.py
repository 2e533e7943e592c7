"""Resource budgets for exact arithmetic.

The refinement construction is doubly exponential in its step index, so any
operation that would materialize a paper-scale value must fail with a typed
error instead of exhausting memory. All caps live here; the big-integer cap
can be overridden with the ``NFORGE_BUDGET_MB`` environment variable.
"""

from __future__ import annotations

import os
from contextlib import contextmanager
from dataclasses import dataclass, replace

from .errors import BudgetExceededError

DEFAULT_MB = 256


@dataclass(frozen=True)
class Budget:
    bits: int  # largest big-integer working set, in bits
    cells: int = 1 << 22  # exact-enumeration cell count
    oracle_points: int = 512  # brute-force discrepancy oracle point cap
    window: int = 1 << 21  # orbit window length cap
    samples: int = 1 << 23  # points * samples cap for Monte Carlo runs


def _bits_from_mb(mb: int) -> int:
    return mb << 23


_ACTIVE = Budget(bits=_bits_from_mb(int(os.environ.get("NFORGE_BUDGET_MB", DEFAULT_MB))))


def active() -> Budget:
    return _ACTIVE


def configure(**overrides) -> Budget:
    """Replace fields of the active budget; returns the new budget."""
    global _ACTIVE
    _ACTIVE = replace(_ACTIVE, **overrides)
    return _ACTIVE


@contextmanager
def limited(**overrides):
    """Temporarily shrink (or grow) budgets; restores the previous values."""
    global _ACTIVE
    saved = _ACTIVE
    _ACTIVE = replace(_ACTIVE, **overrides)
    try:
        yield _ACTIVE
    finally:
        _ACTIVE = saved


def check_bits(bits: int, what: str) -> None:
    if bits > _ACTIVE.bits:
        raise BudgetExceededError(
            f"{what} needs about {bits} bits; budget is {_ACTIVE.bits} bits "
            f"(override with NFORGE_BUDGET_MB)",
            required_bits=bits,
            budget_bits=_ACTIVE.bits,
        )


def check_cells(count: int, what: str) -> None:
    if count > _ACTIVE.cells:
        raise BudgetExceededError(
            f"{what} would enumerate {count} cells; budget is {_ACTIVE.cells}",
            required_cells=count,
            budget_cells=_ACTIVE.cells,
        )


def check_window(length: int, what: str) -> None:
    if length > _ACTIVE.window:
        raise BudgetExceededError(
            f"{what} needs a window of {length} orbit points; budget is {_ACTIVE.window}",
            required_window=length,
            budget_window=_ACTIVE.window,
        )
