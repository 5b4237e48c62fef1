from .integrability import IntegrabilityReport, check_integrability
from .spectral import (
    NearZeroReport,
    SpectralModel,
    SpectralValue,
    compose_rhat,
    rhat,
    rhat_grid,
    rhat_near_zero,
    subdiffusive_rhat_coefficient,
)
from .table import SpectralTable, shared_table

__all__ = [
    "IntegrabilityReport",
    "NearZeroReport",
    "SpectralModel",
    "SpectralTable",
    "SpectralValue",
    "check_integrability",
    "compose_rhat",
    "rhat",
    "rhat_grid",
    "rhat_near_zero",
    "shared_table",
    "subdiffusive_rhat_coefficient",
]
