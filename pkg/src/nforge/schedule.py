"""Refinement schedules: every parameter function of the construction.

A schedule fixes, for each step k, which bases participate, the orbit-index
thresholds N(b, k), the guard gap separating consecutive index blocks, the
usable-window exponent n(b, k), the grid-depth cap T(b, k), the candidate
resolution R(k), and the deviation threshold constant. The frozen ``paper``
configuration reproduces the reference values (start step 100, guard 4k,
resolution 2^(k+1)+k, threshold 46); ``toy-k3``..``toy-k6`` run the same
formulas from step 3 so the machinery is executable at desk scale, and
``toy-lowc`` lowers the threshold so the bad-set paths are exercised.
"""

from __future__ import annotations

import functools
from dataclasses import asdict, dataclass
from fractions import Fraction
from pathlib import Path

from . import budget
from .dyadic import ceil_log2, ceil_pow_log_ratio, least_power_exponent
from .errors import BudgetExceededError, ConfigError


@functools.lru_cache(maxsize=16384)
def _index_threshold(exponent: int, b: int) -> int:
    return ceil_pow_log_ratio(exponent, b)


@dataclass(frozen=True)
class Schedule:
    name: str
    start_step: int  # first refinement step k0
    last_step: int  # final step; start_step - 1 means an empty run
    exp_offset: int = 0  # index thresholds use exponent k + exp_offset
    guard_slope: int = 4
    guard_const: int = 0
    resolution_mode: str = "paper"  # "paper": 2^(k+1) + k, "linear": slope*k + offset
    resolution_slope: int = 0
    resolution_offset: int = 0
    base_max: int | None = None  # cap on participating bases; None means b <= k
    threshold: Fraction = Fraction(46)
    overlap_cap: int = 8  # max grid cells one candidate may overlap
    scan_cap: int = 1 << 20  # max candidates scanned per step

    # -- parameter functions -------------------------------------------------

    def exponent(self, k: int) -> int:
        return k + self.exp_offset

    def index_threshold(self, b: int, k: int) -> int:
        """N(b, k): least N with b**N >= 2**(2**exponent(k))."""
        return _index_threshold(self.exponent(k), b)

    def guard(self, k: int) -> int:
        return self.guard_slope * k + self.guard_const

    def usable_gap(self, b: int, k: int) -> int:
        return self.index_threshold(b, k + 1) - self.index_threshold(b, k) - self.guard(k)

    def window_exponent(self, b: int, k: int) -> int:
        """n(b, k): ceiling of log2 of the usable gap between thresholds."""
        gap = self.usable_gap(b, k)
        if gap < 2:
            raise ConfigError(
                f"usable gap {gap} at (b={b}, k={k}) leaves no window", schedule=self.name
            )
        return ceil_log2(gap)

    def depth_cap(self, b: int, k: int) -> int:
        """T(b, k): least T with b**(2T) >= 2**n, the grid-depth cap."""
        return least_power_exponent(b * b, 1 << self.window_exponent(b, k))

    def resolution(self, k: int) -> int:
        if self.resolution_mode == "paper":
            return (1 << (k + 1)) + k
        return self.resolution_slope * k + self.resolution_offset

    def prev_resolution(self, k: int) -> int:
        return self.resolution(k - 1) if k > self.start_step else 0

    def base_cap(self, k: int) -> int:
        return min(k, self.base_max) if self.base_max is not None else k

    def bases(self, k: int) -> range:
        return range(2, self.base_cap(k) + 1)

    def levels(self, b: int, k: int) -> range:
        n = self.window_exponent(b, k)
        return range((n + 1) // 2, n + 1)

    def offset_count(self, b: int, k: int, level: int) -> int:
        """Number of admissible block offsets m at this level (possibly zero)."""
        room = self.usable_gap(b, k) - (1 << (level - 1))
        return room // (1 << level) + 1 if room >= 0 else 0

    def window_start(self, b: int, k: int, level: int, offset: int) -> int:
        return self.index_threshold(b, k) + self.guard(k) + (offset << level)

    def elementary_depth(self, b: int, k: int) -> int:
        """Grid depth at which every windowed count of step k is constant."""
        return self.depth_cap(b, k) + self.index_threshold(b, k + 1)

    def candidate_count(self, k: int) -> int:
        shift = self.resolution(k) - self.prev_resolution(k)
        budget.check_bits(shift + 1, "candidate count")
        return 1 << shift

    # -- validation ----------------------------------------------------------

    def validate(self) -> dict:
        """Structural and (budget-permitting) numeric validation.

        Raises ConfigError on any violation; returns a report listing the
        (b, k) pairs whose numeric checks did not fit in the budget.
        """
        if self.start_step < 2:
            raise ConfigError(f"start_step must be >= 2, got {self.start_step}")
        if self.last_step < self.start_step - 1:
            raise ConfigError("last_step must be >= start_step - 1")
        if self.exponent(self.start_step) < 1:
            raise ConfigError("exponent(start_step) must be >= 1")
        if self.threshold <= 0:
            raise ConfigError(f"threshold must be positive, got {self.threshold}")
        if self.resolution_mode not in ("paper", "linear"):
            raise ConfigError(f"unknown resolution mode {self.resolution_mode!r}")
        if self.base_max is not None and self.base_max < 2:
            raise ConfigError("base_max must be >= 2 when set")
        checked: list[tuple[int, int]] = []
        skipped: list[dict] = []
        for k in range(self.start_step, self.last_step + 1):
            if self.guard(k) < 0:
                raise ConfigError(f"guard({k}) is negative")
            res, prev = self.resolution(k), self.prev_resolution(k)
            if res <= prev:
                raise ConfigError(f"resolution must increase: R({k})={res} <= {prev}")
            if self.base_cap(k) < 2:
                raise ConfigError(f"no bases in range at step {k}")
            for b in self.bases(k):
                try:
                    self._validate_pair(b, k)
                    checked.append((b, k))
                except BudgetExceededError as exc:
                    skipped.append({"b": b, "k": k, "reason": str(exc)})
        return {"ok": True, "checked": checked, "skipped": skipped}

    def _validate_pair(self, b: int, k: int) -> None:
        if self.usable_gap(b, k) < 2:
            raise ConfigError(
                f"thresholds at (b={b}, k={k}) leave usable gap "
                f"{self.usable_gap(b, k)} < 2",
                schedule=self.name,
            )
        depth = self.elementary_depth(b, k)
        res = self.resolution(k)
        budget.check_bits(depth * b.bit_length(), "cell/candidate overlap check")
        budget.check_bits(res, "candidate resolution")
        cells = b**depth // (1 << res) + 2
        if cells > self.overlap_cap:
            raise ConfigError(
                f"candidates at (b={b}, k={k}) may overlap {cells} cells; "
                f"cap is {self.overlap_cap}",
                schedule=self.name,
            )

    # -- serialization -------------------------------------------------------

    def to_config_dict(self) -> dict:
        d = asdict(self)
        d["threshold"] = f"{self.threshold.numerator}/{self.threshold.denominator}"
        d["base_max"] = "none" if self.base_max is None else self.base_max
        return d


def schedule_values(s: Schedule, b: int, k: int) -> tuple[int, int, int, int, int, int]:
    """(N_k, N_{k+1}, n, T, guard, R) for an in-range (b, k), exact integers."""
    if not s.start_step <= k <= s.last_step:
        raise ConfigError(f"step {k} outside [{s.start_step}, {s.last_step}]")
    if b not in s.bases(k):
        raise ConfigError(f"base {b} not scheduled at step {k}")
    return (
        s.index_threshold(b, k),
        s.index_threshold(b, k + 1),
        s.window_exponent(b, k),
        s.depth_cap(b, k),
        s.guard(k),
        s.resolution(k),
    )


def partition_check(s: Schedule, b: int, upto: int) -> bool:
    """Whether the guard blocks and main blocks tile (N_start, upto] exactly.

    Walks the integers directly: each j must land in exactly one of the sets
    (N_k, N_k + guard] or (N_k + guard, N_{k+1}]. A corrupted guard (overlap
    or gap) shows up as a double- or un-marked integer.
    """
    if b < 2:
        raise ConfigError(f"base must be >= 2, got {b}")
    if s.base_max is not None and b > s.base_max:
        raise ConfigError(f"base {b} never participates under schedule {s.name}")
    start_k = max(s.start_step, b)
    n_start = s.index_threshold(b, start_k)
    if upto <= n_start:
        return True
    budget.check_cells(upto - n_start, "partition enumeration")
    marks = [0] * (upto - n_start)  # slot i <-> integer n_start + 1 + i
    k = start_k
    while True:
        nk = s.index_threshold(b, k)
        if nk >= upto:
            break
        nk1 = s.index_threshold(b, k + 1)
        g = s.guard(k)
        for lo, hi in ((nk, nk + g), (nk + g, nk1)):
            for j in range(max(lo, n_start) + 1, min(hi, upto) + 1):
                marks[j - n_start - 1] += 1
        k += 1
    return all(m == 1 for m in marks)


def _toy(kmax: int) -> Schedule:
    return Schedule(name=f"toy-k{kmax}", start_step=3, last_step=kmax, guard_slope=1)


PRESETS: dict[str, Schedule] = {
    "paper": Schedule(name="paper", start_step=100, last_step=100),
    "toy-k3": _toy(3),
    "toy-k4": _toy(4),
    "toy-k5": _toy(5),
    "toy-k6": _toy(6),
    "toy-lowc": Schedule(
        name="toy-lowc",
        start_step=3,
        last_step=3,
        exp_offset=-1,
        guard_slope=0,
        guard_const=1,
        resolution_mode="linear",
        resolution_slope=4,
        resolution_offset=0,
        base_max=2,
        threshold=Fraction(1, 2),
        overlap_cap=16,
    ),
}

_INT_FIELDS = {
    "start_step",
    "last_step",
    "exp_offset",
    "guard_slope",
    "guard_const",
    "resolution_slope",
    "resolution_offset",
    "overlap_cap",
    "scan_cap",
}


def parse_config(text: str) -> Schedule:
    """Parse the flat key/value schedule format (one `key = value` per line)."""
    values: dict = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, val = (part.strip() for part in line.partition("="))
        if key in _INT_FIELDS:
            values[key] = int(val)
        elif key == "threshold":
            values[key] = Fraction(val)
        elif key == "base_max":
            values[key] = None if val.lower() in ("none", "") else int(val)
        elif key in ("name", "resolution_mode"):
            values[key] = val
        else:
            raise ConfigError(f"line {lineno}: unknown schedule field {key!r}")
    try:
        return Schedule(**values)
    except TypeError as exc:
        raise ConfigError(f"incomplete schedule config: {exc}") from exc


def write_config(s: Schedule, path: str | Path) -> None:
    lines = [f"{key} = {value}" for key, value in s.to_config_dict().items()]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def get_schedule(name_or_path: str) -> Schedule:
    """Resolve a named preset, or load a config file if the name has a path."""
    if name_or_path in PRESETS:
        return PRESETS[name_or_path]
    path = Path(name_or_path)
    if path.exists():
        return parse_config(path.read_text(encoding="utf-8"))
    raise ConfigError(
        f"unknown schedule {name_or_path!r}; presets: {', '.join(sorted(PRESETS))}"
    )
