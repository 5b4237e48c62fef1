from .abelian import (
    AbelianReport,
    GapReport,
    IncrementCheck,
    RateFit,
    RateReport,
    TauberianEstimate,
    abelian_limits,
    log_increment_check,
    oscillatory_moments,
    small_frequency_rates,
    tauberian_recover,
    truncated_integral_gap,
)
from .transform import (
    TransformRow,
    TransformValue,
    kcos,
    kernel_integral,
    ksin,
    tail_remainder_bound,
    transform_grid,
    validate_grid,
)

__all__ = [
    "AbelianReport",
    "GapReport",
    "IncrementCheck",
    "RateFit",
    "RateReport",
    "TauberianEstimate",
    "TransformRow",
    "TransformValue",
    "abelian_limits",
    "kcos",
    "kernel_integral",
    "ksin",
    "log_increment_check",
    "oscillatory_moments",
    "small_frequency_rates",
    "tail_remainder_bound",
    "tauberian_recover",
    "transform_grid",
    "truncated_integral_gap",
    "validate_grid",
]
