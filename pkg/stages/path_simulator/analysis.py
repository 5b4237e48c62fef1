import itertools
import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Any, NamedTuple

import numpy as np
from scipy import stats

from shared.errors import InvalidInputError
from stages.msd_engine import msd
from stages.spectral_density import SpectralModel, SpectralTable, shared_table

from .simulator import DEFAULTS, PathEnsemble

logger = logging.getLogger(__name__)

_CHECKS = {"z_threshold": 3.0, "gaussianity_level": 0.01, "min_gaussianity_paths": 20, **DEFAULTS.get("checks", {})}


class EmpiricalMsd(NamedTuple):
    times: np.ndarray
    mean: np.ndarray
    stderr: np.ndarray


def empirical_msd(ensemble: PathEnsemble) -> EmpiricalMsd:
    """Mean of X(t)^2 over paths with standard error sample-std / sqrt(P)."""
    if ensemble.n_paths < 2:
        raise InvalidInputError("Empirical MSD needs at least two paths")
    squares = np.square(ensemble.paths)
    stderr = squares.std(axis=0, ddof=1) / math.sqrt(ensemble.n_paths)
    return EmpiricalMsd(ensemble.times.copy(), squares.mean(axis=0), stderr)


@dataclass(frozen=True)
class TamsdCurve:
    lags: np.ndarray
    # shape (paths, lags)
    per_path: np.ndarray
    mean: np.ndarray
    stderr: np.ndarray

    def rows(self) -> list[tuple[float, float, float]]:
        return [(float(lag), float(m), float(s)) for lag, m, s in zip(self.lags, self.mean, self.stderr, strict=True)]


def _uniform_step(times: np.ndarray) -> float:
    steps = np.diff(times)
    step = float(steps[0])
    if not np.allclose(steps, step, rtol=1e-9, atol=0.0):
        raise InvalidInputError("Time averages need a uniform time grid")
    return step


def _lag_steps(times: np.ndarray, lags: Sequence[float]) -> list[int]:
    step = _uniform_step(times)
    horizon = times.size - 1
    out = []
    for lag in lags:
        k = float(lag) / step
        if not math.isclose(k, round(k), rel_tol=0.0, abs_tol=1e-9 * max(1.0, k)) or round(k) < 1:
            raise InvalidInputError(f"Lag {lag:g} is not a positive multiple of the step {step:g}")
        if round(k) > horizon:
            raise InvalidInputError(f"Lag {lag:g} exceeds the observation horizon {times[-1]:g}")
        out.append(int(round(k)))
    return out


def tamsd(ensemble: PathEnsemble, lags: Sequence[float]) -> TamsdCurve:
    """Time-averaged MSD per path: mean of (X(t_{i+k}) - X(t_i))^2 over i = 0..N-k, lag = k * step."""
    steps = _lag_steps(ensemble.times, lags)
    x = ensemble.paths
    per_path = np.empty((ensemble.n_paths, len(steps)))
    for j, k in enumerate(steps):
        per_path[:, j] = np.mean(np.square(x[:, k:] - x[:, :-k]), axis=1)
    mean = per_path.mean(axis=0)
    if ensemble.n_paths > 1:
        stderr = per_path.std(axis=0, ddof=1) / math.sqrt(ensemble.n_paths)
    else:
        stderr = np.full(len(steps), math.nan)
    return TamsdCurve(np.asarray(lags, dtype=float), per_path, mean, stderr)


def _z_score(a: float, se_a: float, b: float, se_b: float) -> float:
    if a == b:
        return 0.0
    spread = math.hypot(se_a, se_b)
    return math.inf if spread == 0 else abs(a - b) / spread


@dataclass(frozen=True)
class StationarityReport:
    lag: float
    shifts: list[float]
    variances: list[float]
    stderrs: list[float]
    max_z: float
    passed: bool

    def as_dict(self) -> dict[str, Any]:
        return {
            "lag": self.lag,
            "shifts": self.shifts,
            "variances": self.variances,
            "stderrs": self.stderrs,
            "max_z": self.max_z,
            "passed": self.passed,
        }


def stationarity_check(
    ensemble: PathEnsemble, lag: float, shifts: Sequence[float], z_threshold: float | None = None
) -> StationarityReport:
    """Compare var(X(s + lag) - X(s)) across shifts s by pairwise z-scores."""
    if ensemble.n_paths < 2:
        raise InvalidInputError("Stationarity check needs at least two paths")
    z_threshold = float(_CHECKS["z_threshold"]) if z_threshold is None else z_threshold
    (k,) = _lag_steps(ensemble.times, [lag])
    scale = math.sqrt(2.0 / (ensemble.n_paths - 1))
    variances, stderrs = [], []
    for s in shifts:
        i = ensemble.index_of(s)
        if i + k >= ensemble.times.size:
            raise InvalidInputError(f"Shift {s:g} plus lag {lag:g} runs past the horizon")
        increment = ensemble.paths[:, i + k] - ensemble.paths[:, i]
        var = float(np.var(increment, ddof=1))
        variances.append(var)
        stderrs.append(var * scale)
    pairs = itertools.combinations(range(len(variances)), 2)
    max_z = max((_z_score(variances[a], stderrs[a], variances[b], stderrs[b]) for a, b in pairs), default=0.0)
    return StationarityReport(float(lag), [float(s) for s in shifts], variances, stderrs, max_z, max_z < z_threshold)


class CovarianceEstimate(NamedTuple):
    value: float
    stderr: float


def empirical_covariance(ensemble: PathEnsemble, t: float, s: float) -> CovarianceEstimate:
    if ensemble.n_paths < 2:
        raise InvalidInputError("Covariance estimates need at least two paths")
    product = ensemble.paths[:, ensemble.index_of(t)] * ensemble.paths[:, ensemble.index_of(s)]
    return CovarianceEstimate(float(product.mean()), float(product.std(ddof=1) / math.sqrt(product.size)))


def target_covariance(
    model: SpectralModel,
    t: float,
    s: float,
    tol: float | None = None,
    table: SpectralTable | None = None,
) -> CovarianceEstimate:
    """E X(t) X(s) = 1/2 (MSD(t) + MSD(s) - MSD(|t - s|)), with the propagated quadrature error."""
    if t < 0 or s < 0:
        raise InvalidInputError(f"Covariance needs nonnegative times, got {t}, {s}")
    table = shared_table(model) if table is None else table
    value, error = 0.0, 0.0
    for sign, time in ((1.0, t), (1.0, s), (-1.0, abs(t - s))):
        if time == 0:
            continue
        point = msd(model, time, tol, table)
        value += sign * point.value
        error += point.error
    return CovarianceEstimate(0.5 * value, 0.5 * error)


class GaussianityResult(NamedTuple):
    t: float
    statistic: float
    p_value: float
    passed: bool


def gaussianity_check(
    ensemble: PathEnsemble, check_times: Sequence[float], level: float | None = None
) -> list[GaussianityResult]:
    """D'Agostino-Pearson normality test of X(t) across paths at each check time."""
    level = float(_CHECKS["gaussianity_level"]) if level is None else level
    if ensemble.n_paths < int(_CHECKS["min_gaussianity_paths"]):
        raise InvalidInputError(f"Normality tests need at least {_CHECKS['min_gaussianity_paths']} paths")
    results = []
    for t in check_times:
        if t <= 0:
            raise InvalidInputError("X(0) = 0 is degenerate; check times must be positive")
        statistic, p_value = stats.normaltest(ensemble.paths[:, ensemble.index_of(t)])
        results.append(GaussianityResult(float(t), float(statistic), float(p_value), bool(p_value >= level)))
        logger.debug("Normality at t=%g: p=%.3g", t, p_value)
    return results
