"""The inductive interval-refinement construction.

Each step k partitions the current interval into candidate subintervals of
width 2**-R(k) and selects the leftmost candidate that stays clear of every
base's bad set. The bad set of base b is a union of windowed-count deviation
events, constant on base-b grid cells of the schedule's elementary depth, so
a candidate is tested by enumerating the grid cells it overlaps and checking
every admissible window tuple on each cell. The selected interval's left
endpoint drives the emitted binary digits; the whole run is a pure function
of the schedule, instrumentation counters included.

Scan order is fixed (bases ascending; per base, overlapping cells ascending;
per cell, grid depth, band cell, block level, block offset ascending, with
short-circuit on the first deviation) so counters are reproducible. When the
candidate scan runs on a worker pool the result and all counters equal the
sequential scan: verdicts are collected per candidate and aggregated over the
prefix that ends at the selected interval.
"""

from __future__ import annotations

import hashlib
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from . import budget
from .bounds import deviation_exceeds_threshold
from .counting import CountWindow, orbit_numerators
from .dyadic import BaseGridInterval, DyadicInterval
from .errors import (
    BudgetExceededError,
    ConfigError,
    NoGoodIntervalError,
    OverlapCapError,
    ResolutionTooCoarseError,
)
from .schedule import Schedule


@dataclass(frozen=True)
class WindowSpec:
    """One deviation-event index tuple: base, step, band cell, grid depth,
    block level, and block offset."""

    base: int
    step: int
    cell: int
    depth: int
    level: int
    offset: int


def iter_window_specs(s: Schedule, b: int, k: int):
    """All admissible window tuples at (b, k), in the fixed scan order."""
    for h in range(1, s.depth_cap(b, k) + 1):
        for a in range(b**h):
            for level in s.levels(b, k):
                for m in range(s.offset_count(b, k, level)):
                    yield WindowSpec(b, k, a, h, level, m)


class _StepCache:
    """Per-step memo of cell representatives, orbits, and digit rows.

    Orbit work is charged per unique (base, cell) pair so aggregate counters
    do not depend on evaluation order or on worker-pool scheduling.
    """

    def __init__(self, s: Schedule, k: int):
        self.s = s
        self.k = k
        self._orbits: dict[tuple[int, int], tuple[int, list[int]]] = {}
        self._rows: dict[tuple[int, int, int], list[int]] = {}

    def orbit_length(self, b: int) -> int:
        return self.s.index_threshold(b, self.k + 1)

    def orbit(self, b: int, cell: int) -> tuple[int, list[int]]:
        key = (b, cell)
        got = self._orbits.get(key)
        if got is None:
            depth = self.s.elementary_depth(b, self.k)
            rep = BaseGridInterval(b, cell, depth).dyadic_inside()
            nums = orbit_numerators(rep, b, CountWindow(0, self.orbit_length(b)))
            got = self._orbits[key] = (rep.scale, nums)
        return got

    def digit_row(self, b: int, cell: int, h: int) -> list[int]:
        """Base-b**h band index of each orbit point of the cell representative."""
        key = (b, cell, h)
        row = self._rows.get(key)
        if row is None:
            scale, nums = self.orbit(b, cell)
            p = b**h
            row = self._rows[key] = [(y * p) >> scale for y in nums]
        return row


def cell_deviates(
    cell: BaseGridInterval,
    spec: WindowSpec,
    s: Schedule,
    *,
    near_middle: bool = False,
) -> bool:
    """Whether the windowed count on this grid cell exceeds its threshold.

    The count function is constant on cells at the schedule's elementary
    depth, so the verdict does not depend on the representative; near_middle
    evaluates at a second interior point for exactly that constancy check.
    """
    b, k = spec.base, spec.step
    if cell.base != b:
        raise ConfigError(f"cell base {cell.base} differs from spec base {b}")
    needed = s.elementary_depth(b, k)
    if cell.depth < needed:
        raise ResolutionTooCoarseError(
            f"cell depth {cell.depth} < elementary depth {needed}; counts are "
            "not constant on this cell",
            base=b,
            step=k,
        )
    if not 1 <= spec.depth <= s.depth_cap(b, k):
        raise ConfigError(f"grid depth {spec.depth} out of range at (b={b}, k={k})")
    if spec.level not in s.levels(b, k):
        raise ConfigError(f"block level {spec.level} out of range at (b={b}, k={k})")
    if not 0 <= spec.offset < s.offset_count(b, k, spec.level):
        raise ConfigError(f"block offset {spec.offset} out of range at (b={b}, k={k})")
    if not 0 <= spec.cell < b**spec.depth:
        raise ConfigError(f"band cell {spec.cell} out of range for depth {spec.depth}")
    rep = cell.dyadic_inside(near_middle=near_middle)
    start = s.window_start(b, k, spec.level, spec.offset)
    length = 1 << (spec.level - 1)
    nums = orbit_numerators(rep, b, CountWindow(start, length))
    p = b**spec.depth
    count = sum(1 for y in nums if (y * p) >> rep.scale == spec.cell)
    return deviation_exceeds_threshold(
        count, b, spec.depth, spec.level, s.window_exponent(b, k), s.threshold
    )


def overlapping_cells(cand: DyadicInterval, b: int, depth: int, cap: int) -> range:
    """Indices of the depth-d base-b cells meeting the candidate, ascending."""
    budget.check_bits(depth * b.bit_length(), "cell overlap enumeration")
    p = b**depth
    lo = (cand.index * p) >> cand.scale
    hi = ((cand.index + 1) * p - 1) >> cand.scale
    if hi - lo + 1 > cap:
        raise OverlapCapError(
            f"candidate overlaps {hi - lo + 1} cells of base {b}; cap is {cap} "
            "(schedule resolution is misconfigured)",
            base=b,
            cells=hi - lo + 1,
        )
    return range(lo, hi + 1)


def candidate_bad(
    cand: DyadicInterval,
    b: int,
    k: int,
    s: Schedule,
    *,
    cache: _StepCache | None = None,
    counters: dict | None = None,
    touched: set | None = None,
) -> bool:
    """Whether the candidate meets the base-b bad set at step k.

    Enumerates every elementary cell overlapping the candidate and every
    admissible window tuple, short-circuiting on the first deviation.
    """
    if cand.scale != s.resolution(k):
        raise ConfigError(
            f"candidate scale {cand.scale} differs from resolution {s.resolution(k)}"
        )
    cache = cache or _StepCache(s, k)
    depth = s.elementary_depth(b, k)
    n = s.window_exponent(b, k)
    thr = s.threshold
    n_k = s.index_threshold(b, k)
    g = s.guard(k)
    levels = list(s.levels(b, k))
    stats = None
    if counters is not None:
        stats = counters.setdefault(b, {"f_evaluations": 0, "indices_inspected": 0})
    for cell in overlapping_cells(cand, b, depth, s.overlap_cap):
        if touched is not None:
            touched.add((b, cell))
        for h in range(1, s.depth_cap(b, k) + 1):
            row = cache.digit_row(b, cell, h)
            for a in range(b**h):
                for level in levels:
                    length = 1 << (level - 1)
                    for m in range(s.offset_count(b, k, level)):
                        start = n_k + g + (m << level)
                        count = 0
                        for j in range(start, start + length):
                            if row[j] == a:
                                count += 1
                        if stats is not None:
                            stats["f_evaluations"] += 1
                            stats["indices_inspected"] += length
                        if deviation_exceeds_threshold(count, b, h, level, n, thr):
                            return True
    return False


@dataclass
class ConstructionState:
    """Mutable run state: current step, interval, digit prefix, counters.

    The digit prefix is exactly the binary expansion of the interval's left
    endpoint, one character per bit. bigint_mults counts modular orbit
    multiplications, charged once per unique (base, cell) pair per step.
    """

    step: int
    omega: DyadicInterval
    digits: str
    counters: dict = field(default_factory=dict)
    step_records: list = field(default_factory=list)


_TOTAL_KEYS = ("candidates_scanned", "f_evaluations", "indices_inspected", "bigint_mults")


def initial_state(s: Schedule) -> ConstructionState:
    return ConstructionState(
        step=s.start_step - 1,
        omega=DyadicInterval(0, 0),
        digits="",
        counters={key: 0 for key in _TOTAL_KEYS},
    )


def _evaluate_candidate(cand, k, s, cache):
    counters: dict = {}
    touched: set = set()
    bad = False
    for b in s.bases(k):
        if candidate_bad(cand, b, k, s, cache=cache, counters=counters, touched=touched):
            bad = True
            break
    return bad, counters, touched


def refine_step(state: ConstructionState, s: Schedule, *, threads: int = 1) -> ConstructionState:
    """Run one refinement step, scanning candidates left to right.

    Raises NoGoodIntervalError if every candidate is bad (possible only under
    aggressive toy schedules) and BudgetExceededError past the scan cap.
    """
    k = state.step + 1
    if k > s.last_step:
        raise ConfigError(f"step {k} exceeds schedule last step {s.last_step}")
    res = s.resolution(k)
    budget.check_bits(res, "candidate scale")
    prev = s.prev_resolution(k)
    if state.omega.scale != prev:
        raise ConfigError(
            f"state interval scale {state.omega.scale} does not match "
            f"schedule resolution {prev} before step {k}"
        )
    shift = res - prev
    total = 1 << shift if shift <= 62 else None
    base_index = state.omega.index << shift

    cache = _StepCache(s, k)
    deltas: list[tuple[dict, set]] = []
    selected = None
    chunk = 1 if threads <= 1 else max(4 * threads, 16)
    pool = ThreadPoolExecutor(max_workers=threads) if threads > 1 else None
    try:
        i = 0
        while selected is None:
            if total is not None and i >= total:
                raise NoGoodIntervalError(
                    f"all {total} candidates at step {k} are bad", step=k, scanned=i
                )
            if i >= s.scan_cap:
                raise BudgetExceededError(
                    f"scan cap {s.scan_cap} reached at step {k} with no good "
                    "candidate",
                    step=k,
                    scanned=i,
                )
            hi = min(i + chunk, s.scan_cap, total if total is not None else i + chunk)
            span = range(i, hi)

            def evaluate(off):
                return _evaluate_candidate(DyadicInterval(base_index + off, res), k, s, cache)

            results = pool.map(evaluate, span) if pool else map(evaluate, span)
            for off, (bad, counters, touched) in zip(span, results):
                deltas.append((counters, touched))
                if not bad:
                    selected = off
                    break
            else:
                i = hi
    finally:
        if pool is not None:
            pool.shutdown(wait=True)

    per_base: dict[int, dict] = {}
    touched_union: set = set()
    for counters, touched in deltas:
        touched_union |= touched
        for b, stats in counters.items():
            agg = per_base.setdefault(
                b, {"f_evaluations": 0, "indices_inspected": 0, "cells_touched": 0, "bigint_mults": 0}
            )
            agg["f_evaluations"] += stats["f_evaluations"]
            agg["indices_inspected"] += stats["indices_inspected"]
    for b, cell in touched_union:
        agg = per_base.setdefault(
            b, {"f_evaluations": 0, "indices_inspected": 0, "cells_touched": 0, "bigint_mults": 0}
        )
        agg["cells_touched"] += 1
        agg["bigint_mults"] += cache.orbit_length(b)

    record = {
        "k": k,
        "resolution": res,
        "candidates_log2": shift,
        "scanned": selected + 1,
        "selected_offset": selected,
        "per_base": per_base,
        "f_evaluations": sum(v["f_evaluations"] for v in per_base.values()),
        "indices_inspected": sum(v["indices_inspected"] for v in per_base.values()),
        "bigint_mults": sum(v["bigint_mults"] for v in per_base.values()),
    }
    state.step = k
    state.omega = DyadicInterval(base_index + selected, res)
    state.digits = format(state.omega.index, f"0{res}b")
    state.step_records.append(record)
    state.counters["candidates_scanned"] += record["scanned"]
    for key in ("f_evaluations", "indices_inspected", "bigint_mults"):
        state.counters[key] += record[key]
    return state


def construct(s: Schedule, *, threads: int = 1) -> ConstructionState:
    """Run the full construction; identical schedules give identical states."""
    s.validate()
    state = initial_state(s)
    for _ in range(s.start_step, s.last_step + 1):
        refine_step(state, s, threads=threads)
    return state


def run_until_bits(s: Schedule, nbits: int, *, threads: int = 1) -> ConstructionState:
    """Run only as many steps as needed to determine nbits digits."""
    if nbits < 1:
        raise ConfigError(f"nbits must be >= 1, got {nbits}")
    s.validate()
    if s.last_step < s.start_step or nbits > s.resolution(s.last_step):
        raise ConfigError(
            f"schedule {s.name} determines at most "
            f"{s.resolution(s.last_step) if s.last_step >= s.start_step else 0} bits, "
            f"requested {nbits}"
        )
    state = initial_state(s)
    while len(state.digits) < nbits:
        refine_step(state, s, threads=threads)
    return state


def digits_for(s: Schedule, nbits: int, *, threads: int = 1) -> str:
    """The first nbits binary digits of the constructed number."""
    return run_until_bits(s, nbits, threads=threads).digits[:nbits]


def op_census(state: ConstructionState, s: Schedule) -> dict:
    """Per-step instrumentation compared against the nominal operation counts.

    The nominal per-sweep index count for one (base, depth, band-cell, level)
    sweep is 2**n(b, k) (block-offset range bound times window length, as the
    cost model states it); the measured enumeration never exceeds it. The
    candidate cap is 2**(2**k + 1) and the per-candidate operation estimate is
    k * k/2 * k**(k/2) * 2**k; both are reported alongside the measured
    counters.
    """
    steps = []
    for rec in state.step_records:
        k = rec["k"]
        cap_log2 = (1 << k) + 1
        scanned = rec["scanned"]
        sweeps = {}
        for b in s.bases(k):
            n = s.window_exponent(b, k)
            full = sum(
                b**h * sum(s.offset_count(b, k, lv) << (lv - 1) for lv in s.levels(b, k))
                for h in range(1, s.depth_cap(b, k) + 1)
            )
            measured = rec["per_base"].get(b, {}).get("indices_inspected", 0)
            sweeps[b] = {
                "window_exponent": n,
                "nominal_sweep_indices": 1 << n,
                "full_scan_indices_per_cell": full,
                "measured_indices": measured,
            }
        steps.append(
            {
                "k": k,
                "scanned": scanned,
                "candidate_cap_log2": cap_log2,
                "within_candidate_cap": scanned.bit_length() - 1 <= cap_log2,
                "predicted_ops_per_candidate": float(k) * (k / 2) * float(k) ** (k / 2) * 2.0**k,
                "sweeps": sweeps,
            }
        )
    return {"per_step": steps, "totals": dict(state.counters)}


# -- digit files --------------------------------------------------------------

_MAGIC = "NFORGE v1"
_LINE_BITS = 64


def format_digit_file(s: Schedule, digits: str) -> str:
    header = (
        f"{_MAGIC} schedule={s.name} k0={s.start_step} kmax={s.last_step} "
        f"c={s.threshold.numerator}/{s.threshold.denominator}"
    )
    lines = [header]
    for i in range(0, len(digits), _LINE_BITS):
        lines.append(digits[i : i + _LINE_BITS])
    return "\n".join(lines) + "\n"


def write_digit_file(path: str | Path, s: Schedule, digits: str) -> None:
    Path(path).write_text(format_digit_file(s, digits), encoding="utf-8")


def read_digit_file(path: str | Path) -> tuple[dict, str]:
    """Parse a digit file; returns (header fields, bit string)."""
    text = Path(path).read_text(encoding="utf-8")
    lines = text.splitlines()
    if not lines or not lines[0].startswith(_MAGIC + " "):
        raise ConfigError(f"{path}: not a digit file (missing '{_MAGIC}' header)")
    header: dict = {}
    for token in lines[0][len(_MAGIC) + 1 :].split():
        key, _, val = token.partition("=")
        header[key] = val
    bits = "".join(lines[1:])
    if bits.strip("01"):
        raise ConfigError(f"{path}: digit body contains non-binary characters")
    return header, bits


def run_report(state: ConstructionState, s: Schedule) -> dict:
    return {
        "format": "nforge-run/1",
        "schedule": s.to_config_dict(),
        "digits_bits": len(state.digits),
        "digits_sha256": hashlib.sha256(state.digits.encode()).hexdigest(),
        "steps": state.step_records,
        "totals": dict(state.counters),
        "census": op_census(state, s),
    }


def dump_json(obj: dict, path: str | Path) -> None:
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n", encoding="utf-8")
