from .analysis import (
    CovarianceEstimate,
    EmpiricalMsd,
    GaussianityResult,
    StationarityReport,
    TamsdCurve,
    empirical_covariance,
    empirical_msd,
    gaussianity_check,
    stationarity_check,
    tamsd,
    target_covariance,
)
from .simulator import (
    FrequencyGrid,
    PathEnsemble,
    build_frequency_grid,
    simulate,
    spectral_tail_mass,
    validate_path_grid,
)

__all__ = [
    "CovarianceEstimate",
    "EmpiricalMsd",
    "FrequencyGrid",
    "GaussianityResult",
    "PathEnsemble",
    "StationarityReport",
    "TamsdCurve",
    "build_frequency_grid",
    "empirical_covariance",
    "empirical_msd",
    "gaussianity_check",
    "simulate",
    "spectral_tail_mass",
    "stationarity_check",
    "tamsd",
    "target_covariance",
    "validate_path_grid",
]
