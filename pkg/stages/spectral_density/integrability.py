import logging
import math
from dataclasses import asdict, dataclass
from typing import Any

from shared.errors import ModelInvalidError

from .spectral import DEFAULTS, SpectralModel
from .table import SpectralTable

logger = logging.getLogger(__name__)

_INTEGRABILITY = {"omega_max": 1e3, "omega_min": 1e-8, **DEFAULTS.get("integrability", {})}


@dataclass(frozen=True)
class IntegrabilityReport:
    # integral of r over the whole real line
    total: float
    abs_error: float
    body: float
    tail_majorant: float
    omega_max: float
    finite: bool

    def as_dict(self) -> dict[str, Any]:
        return asdict(self)


def check_integrability(
    model: SpectralModel,
    tol: float | None = None,
    omega_max: float | None = None,
    table: SpectralTable | None = None,
    threads: int | None = None,
) -> IntegrabilityReport:
    """Integral of r over the real line: quadrature on (0, omega_max] plus a w^-2 majorant beyond.

    Beyond omega_max, w^2 r(w) is bounded by its value at omega_max, so each
    half-line tail is at most omega_max * r(omega_max). The majorant is
    charged as error, not added to the total.
    """
    omega_max = float(_INTEGRABILITY["omega_max"] if omega_max is None else omega_max)
    if table is None or table.omega_hi < omega_max:
        table = SpectralTable(model, float(_INTEGRABILITY["omega_min"]), omega_max, tol=tol, threads=threads)
    body = table.mass(0.0, omega_max)
    if not math.isfinite(body.value):
        raise ModelInvalidError(f"The spectral density of {model.kernel.name} is not integrable near the origin")
    edge_value = float(table(omega_max)[()])
    tail = omega_max * edge_value
    relative = table.relative_error * body.value
    report = IntegrabilityReport(
        total=2.0 * body.value,
        abs_error=2.0 * (body.abs_error + relative + tail),
        body=body.value,
        tail_majorant=tail,
        omega_max=omega_max,
        finite=True,
    )
    logger.info("Integral of r for %s: %.10g +- %.3g", model.kernel.name, report.total, report.abs_error)
    return report
