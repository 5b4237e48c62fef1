import logging
import math
from dataclasses import asdict, dataclass
from typing import Any

import numpy as np

from shared.errors import InvalidInputError
from shared.kernels import Critical, Diffusive, MemoryKernel, Subdiffusive
from shared.numerics import decades, fit_line, fit_power_law

from .asymptote import AsymptoteSpec
from .msd import DEFAULTS, MsdCurve

logger = logging.getLogger(__name__)

_DEVIATION = {
    "slack": 0.1,
    "min_decades": 2.0,
    "noise_factor": 2.0,
    "critical_bound": 20.0,
    "growth_factor": 1.5,
    **DEFAULTS.get("deviation", {}),
}
_CLASSIFY = {
    "t_min": 5.0,
    "min_decades": 3.0,
    "corrected_tolerance": 0.05,
    "plain_gap": 0.03,
    **DEFAULTS.get("classify", {}),
}


@dataclass(frozen=True)
class DeviationFit:
    kind: str
    # fitted decay exponent, or the sup of |ratio - C| log t in the critical case
    fitted: float
    predicted: float | None
    residual: float
    window: tuple[float, float]
    points: int
    verdict: str

    def as_dict(self) -> dict[str, Any]:
        return asdict(self)


def _critical_fit(curve: MsdCurve, spec: AsymptoteSpec) -> DeviationFit:
    logs = np.log(curve.times)
    product = np.abs(curve.ratio() - spec.constant) * logs
    sup = float(np.max(product))
    span = decades(curve.times)
    window = (float(curve.times[0]), float(curve.times[-1]))
    if span < float(_DEVIATION["min_decades"]):
        return DeviationFit("log", sup, None, 0.0, window, int(curve.times.size), "inconclusive")
    last_decade = curve.times >= curve.times[-1] / 10.0
    earlier = float(np.max(product[~last_decade])) if np.any(~last_decade) else sup
    growing = float(np.max(product[last_decade])) > float(_DEVIATION["growth_factor"]) * earlier + 1e-12
    bounded = sup < float(_DEVIATION["critical_bound"]) and not growing
    spread = float(np.std(product))
    return DeviationFit("log", sup, None, spread, window, int(curve.times.size), "pass" if bounded else "fail")


def deviation_fit(curve: MsdCurve, spec: AsymptoteSpec, slack: float | None = None) -> DeviationFit:
    """Decay of |MSD / g - C| against the predicted rate (power regimes) or boundedness of the log product."""
    if curve.times.size < 3:
        raise InvalidInputError("Deviation fits need at least three curve points")
    if curve.times[-1] < 100.0 * curve.times[0]:
        raise InvalidInputError("Deviation fits need the largest time at least 100 times the smallest")
    if spec.trend == "t/log t":
        if np.any(curve.times <= 1.0):
            raise InvalidInputError("The logarithmic trend needs times above 1")
        fit = _critical_fit(curve, spec)
        logger.info("Critical deviation product sup %.4g: %s", fit.fitted, fit.verdict)
        return fit

    slack = float(_DEVIATION["slack"]) if slack is None else slack
    g = spec.g(curve.times)
    deviation = np.abs(curve.values / g - spec.constant)
    noise = float(_DEVIATION["noise_factor"]) * curve.errors / g
    resolved = deviation > noise
    times = curve.times[resolved]
    window = (float(times[0]), float(times[-1])) if times.size else (0.0, 0.0)
    if times.size < 3 or decades(times) < float(_DEVIATION["min_decades"]):
        logger.warning("Deviations resolved above noise on %d points only; fit inconclusive", times.size)
        return DeviationFit("power", math.nan, spec.predicted_rate, 0.0, window, int(times.size), "inconclusive")
    line = fit_power_law(times, deviation[resolved])
    fitted = -line.slope
    predicted = float(spec.predicted_rate or 0.0)
    verdict = "pass" if fitted >= predicted - slack else "fail"
    logger.info("Deviation exponent %.4g against predicted %.4g: %s", fitted, predicted, verdict)
    return DeviationFit("power", fitted, predicted, line.residual, window, line.points, verdict)


@dataclass(frozen=True)
class MsdClassification:
    alpha_hat: float
    residual: float
    corrected_exponent: float
    corrected_residual: float
    log_corrected: bool

    def as_dict(self) -> dict[str, Any]:
        return asdict(self)


def classify_from_msd(curve: MsdCurve, t_min: float | None = None) -> MsdClassification:
    """Power-law exponent of the MSD and whether a 1/log t correction explains it better.

    Only times at or above ``t_min`` (default ``classify.t_min``) enter the fits.
    """
    t_min = float(_CLASSIFY["t_min"]) if t_min is None else t_min
    curve = curve.window(t_min, math.inf)
    if curve.times.size < 3 or decades(curve.times) < float(_CLASSIFY["min_decades"]):
        span = _CLASSIFY["min_decades"]
        raise InvalidInputError(f"Classification needs at least {span} decades of times from t={t_min:g}")
    plain = fit_power_law(curve.times, curve.values)
    above_one = curve.times > 1.0
    corrected = fit_line(
        np.log(curve.times[above_one]), np.log(curve.values[above_one] * np.log(curve.times[above_one]))
    )
    log_corrected = (
        abs(corrected.slope - 1.0) <= float(_CLASSIFY["corrected_tolerance"])
        and 1.0 - plain.slope >= float(_CLASSIFY["plain_gap"])
        and corrected.residual <= 2.0 * plain.residual
    )
    result = MsdClassification(plain.slope, plain.residual, corrected.slope, corrected.residual, bool(log_corrected))
    logger.info("MSD exponent %.4g (log-corrected %.4g, flag %s)", plain.slope, corrected.slope, log_corrected)
    return result


@dataclass(frozen=True)
class ConjectureReport:
    naive_exponent: float
    fitted_exponent: float
    log_corrected: bool
    consistent: bool
    note: str

    def as_dict(self) -> dict[str, Any]:
        return asdict(self)


def conjecture_check(curve: MsdCurve, kernel: MemoryKernel) -> ConjectureReport:
    """Compare the MSD exponent with the naive rule K ~ t^-a implies MSD ~ t^a."""
    regime = kernel.regime
    if isinstance(regime, Subdiffusive):
        naive = regime.alpha
    elif isinstance(regime, Critical | Diffusive):
        naive = 1.0
    else:
        raise InvalidInputError("The conjecture check needs a classified kernel")
    found = classify_from_msd(curve)
    consistent = abs(found.alpha_hat - naive) <= 0.05 and not found.log_corrected
    if isinstance(regime, Critical):
        note = "t^-1 kernels give t / log t, not t: the naive rule misses the logarithmic correction"
    elif consistent:
        note = "MSD exponent matches the kernel tail"
    else:
        note = "MSD exponent departs from the kernel tail at the sampled times"
    return ConjectureReport(naive, found.alpha_hat, found.log_corrected, consistent, note)
