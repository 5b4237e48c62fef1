from dataclasses import dataclass

import numpy as np
from scipy import stats

from shared.errors import InvalidInputError


@dataclass(frozen=True)
class LineFit:
    slope: float
    intercept: float
    slope_stderr: float
    # root mean square of the residuals
    residual: float
    points: int


def fit_line(x: np.ndarray, y: np.ndarray) -> LineFit:
    """Least-squares line through (x, y) via ``scipy.stats.linregress``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    finite = np.isfinite(x) & np.isfinite(y)
    x, y = x[finite], y[finite]
    if x.size < 2 or np.ptp(x) == 0:
        raise InvalidInputError("A line fit needs at least two distinct abscissae")
    result = stats.linregress(x, y)
    residuals = y - (result.intercept + result.slope * x)
    stderr = float(result.stderr) if x.size > 2 else 0.0
    return LineFit(
        slope=float(result.slope),
        intercept=float(result.intercept),
        slope_stderr=stderr,
        residual=float(np.sqrt(np.mean(residuals**2))),
        points=int(x.size),
    )


def fit_power_law(x: np.ndarray, y: np.ndarray) -> LineFit:
    """Fit y ~ A x**p in log-log space; ``slope`` is p. Non-positive samples are dropped."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    keep = (x > 0) & (y > 0)
    return fit_line(np.log(x[keep]), np.log(y[keep]))


def decades(values: np.ndarray) -> float:
    values = np.asarray(values, dtype=float)
    values = values[values > 0]
    if values.size < 2:
        return 0.0
    return float(np.log10(values.max() / values.min()))
