"""nforge: exact-arithmetic digit construction with verified discrepancy machinery."""

from .bounds import (
    BoundParams,
    DISCREPANCY_ADDENDS,
    DyadicBlock,
    bernstein_bound,
    check_h5_domination,
    deviation_exceeds_threshold,
    deviation_measure_bound,
    discrepancy_constant,
    dyadic_blocks,
    eps_criterion,
    fukuyama_constant,
    occupied_blocks,
    prefix_cover,
    relative_deviation_bound,
    simplified_deviation_bound,
)
from .counting import (
    CountWindow,
    RationalBand,
    count_deviation,
    discrepancy_exact,
    discrepancy_oracle,
    orbit,
    shift_check,
)
from .construction import (
    ConstructionState,
    WindowSpec,
    candidate_bad,
    cell_deviates,
    construct,
    digits_for,
    op_census,
    read_digit_file,
    refine_step,
    run_until_bits,
    write_digit_file,
)
from .dyadic import (
    BaseGridInterval,
    DyadicInterval,
    DyadicRational,
    ceil_pow_log_ratio,
    frac_pow,
    in_cell,
    representative,
)
from .errors import (
    BudgetExceededError,
    ConfigError,
    CriterionViolatedError,
    InsufficientDigitsError,
    NforgeError,
    NoGoodIntervalError,
    OverlapCapError,
    ResolutionTooCoarseError,
)
from .schedule import PRESETS, Schedule, get_schedule, partition_check, schedule_values
from .verification import (
    SweepGrid,
    VerificationReport,
    bad_set_budget_check,
    cover_inflation_check,
    discrepancy_curve,
    exact_event_measure,
    lil_experiment,
    load_rational_points,
    sweep_deviation_bound,
    sweep_simplified_bound,
    van_der_corput,
)

__version__ = "0.1.0"
