from .asymptote import AsymptoteSpec, asymptotic_constant, subdiffusive_constant
from .deviation import (
    ConjectureReport,
    DeviationFit,
    MsdClassification,
    classify_from_msd,
    conjecture_check,
    deviation_fit,
)
from .msd import MsdCurve, MsdPoint, msd, msd_curve, one_minus_cos_over_square

__all__ = [
    "AsymptoteSpec",
    "ConjectureReport",
    "DeviationFit",
    "MsdClassification",
    "MsdCurve",
    "MsdPoint",
    "asymptotic_constant",
    "classify_from_msd",
    "conjecture_check",
    "deviation_fit",
    "msd",
    "msd_curve",
    "one_minus_cos_over_square",
    "subdiffusive_constant",
]
