"""Small-frequency behavior of the transforms.

For a critical kernel (t K(t) -> C1) K_sin tends to C1 pi / 2 and K_cos grows
like C1 |log w|; conversely a K_cos growing like C |log w| forces t K(t) -> C.
The helpers here sample the transforms on geometric grids near zero,
extrapolate the limits and fit the approach rates per regime.
"""

import logging
import math
from collections.abc import Sequence
from dataclasses import asdict, dataclass, field
from typing import Any

import numpy as np
from scipy.special import gamma

from shared.errors import InvalidInputError
from shared.kernels import Critical, Diffusive, MemoryKernel, Subdiffusive
from shared.numerics import decades, fit_line, fit_power_law, geometric_edges, integrate, integrate_singular_origin
from shared.numerics import richardson_extrapolate
from shared.utils.parallel import ordered_map

from .transform import DEFAULTS, kcos, kernel_integral, ksin

logger = logging.getLogger(__name__)

_ABELIAN = {"omega_min": 1e-6, "ratio": 4.0, "points": 7, "order": 2, **DEFAULTS.get("abelian", {})}
_TAUBERIAN = {"min_samples": 6, "min_decades": 3.0, "critical_share": 0.05, **DEFAULTS.get("tauberian", {})}
_RATES = {
    "tol": 1e-10,
    "slack": 0.15,
    "diffusive_grid": [1e-3, 1e-1, 9],
    "subdiffusive_grid": [1e-4, 1e-2, 9],
    "critical_grid": [1e-6, 1e-2, 9],
    "critical_bound": 10.0,
    **DEFAULTS.get("rates", {}),
}


@dataclass(frozen=True)
class AbelianReport:
    omegas: list[float]
    ksin_values: list[float]
    kcos_over_log: list[float]
    limit_sin: float
    limit_sin_error: float
    limit_cos_over_log: float
    limit_cos_over_log_error: float
    expected_sin: float
    expected_cos_over_log: float
    # sup over the grid of |K_cos / |log w| - C1| * |log w|
    log_rate_sup: float

    def as_dict(self) -> dict[str, Any]:
        return asdict(self)


@dataclass(frozen=True)
class TauberianEstimate:
    c1: float
    intercept: float
    residual: float
    critical: bool
    samples: int
    decades: float

    def as_dict(self) -> dict[str, Any]:
        return asdict(self)


@dataclass(frozen=True)
class RateFit:
    quantity: str
    fitted_exponent: float
    theoretical_exponent: float
    passed: bool


@dataclass(frozen=True)
class RateReport:
    regime: str
    omegas: list[float]
    fits: list[RateFit] = field(default_factory=list)
    # critical regime only
    sup_product: float | None = None
    bounded: bool | None = None

    @property
    def passed(self) -> bool:
        if self.bounded is not None:
            return self.bounded
        return all(fit.passed for fit in self.fits)

    def as_dict(self) -> dict[str, Any]:
        return {**asdict(self), "passed": self.passed}


def geometric_grid(omega_min: float, ratio: float, points: int) -> np.ndarray:
    return omega_min * ratio ** np.arange(points)


def _grid_from(spec: Sequence[float]) -> np.ndarray:
    lo, hi, n = spec
    return np.geomspace(float(lo), float(hi), int(n))


def _transforms(kernel: MemoryKernel, omegas: np.ndarray, tol: float, threads: int | None):
    pairs = ordered_map(lambda w: (kcos(kernel, w, tol), ksin(kernel, w, tol)), omegas.tolist(), threads)
    return np.array([p[0].value for p in pairs]), np.array([p[1].value for p in pairs])


def abelian_limits(kernel: MemoryKernel, tol: float | None = None, threads: int | None = None) -> AbelianReport:
    """Extrapolated lim K_sin(w) and lim K_cos(w) / |log w| as w -> 0+ for a critical kernel."""
    if not isinstance(kernel.regime, Critical):
        raise InvalidInputError(f"Abelian limits need a critical kernel, {kernel.name} is {kernel.regime.name}")
    tol = float(DEFAULTS["tol"]) if tol is None else tol
    omegas = geometric_grid(float(_ABELIAN["omega_min"]), float(_ABELIAN["ratio"]), int(_ABELIAN["points"]))
    order = int(_ABELIAN["order"])
    cos_values, sin_values = _transforms(kernel, omegas, tol, threads)
    logs = np.abs(np.log(omegas))
    cos_over_log = cos_values / logs

    limit_sin, sin_err = richardson_extrapolate(omegas, sin_values, order)
    limit_log, log_err = richardson_extrapolate(1.0 / logs, cos_over_log, order)
    c1 = kernel.regime.c1
    report = AbelianReport(
        omegas=omegas.tolist(),
        ksin_values=sin_values.tolist(),
        kcos_over_log=cos_over_log.tolist(),
        limit_sin=limit_sin,
        limit_sin_error=sin_err,
        limit_cos_over_log=limit_log,
        limit_cos_over_log_error=log_err,
        expected_sin=0.5 * math.pi * c1,
        expected_cos_over_log=c1,
        log_rate_sup=float(np.max(np.abs(cos_over_log - c1) * logs)),
    )
    logger.info("Abelian limits of %s: K_sin -> %.6g, K_cos/|log w| -> %.6g", kernel.name, limit_sin, limit_log)
    return report


def tauberian_recover(samples: Sequence[tuple[float, float]] | np.ndarray) -> TauberianEstimate:
    """Estimate C1 as the slope of K_cos(w) against |log w| from samples near zero."""
    data = np.asarray(samples, dtype=float)
    if data.ndim != 2 or data.shape[1] != 2:
        raise InvalidInputError("Tauberian samples must be (omega, K_cos) pairs")
    min_samples = int(_TAUBERIAN["min_samples"])
    if data.shape[0] < min_samples:
        raise InvalidInputError(f"Tauberian recovery needs at least {min_samples} samples, got {data.shape[0]}")
    data = data[np.argsort(data[:, 0], kind="stable")]
    omegas, values = data[:, 0], data[:, 1]
    if np.any(omegas <= 0) or np.any(omegas >= 1):
        raise InvalidInputError("Tauberian samples need frequencies inside (0, 1)")
    span = decades(omegas)
    if span < float(_TAUBERIAN["min_decades"]):
        raise InvalidInputError(f"Tauberian samples span {span:.2f} decades, need {_TAUBERIAN['min_decades']}")
    if np.any(values <= 0):
        raise InvalidInputError("Tauberian samples must be positive")
    slack = 1e-12 * float(np.max(values))
    if np.any(np.diff(values) > slack):
        raise InvalidInputError("Tauberian samples must be non-increasing in omega")

    logs = np.abs(np.log(omegas))
    line = fit_line(logs, values)
    growth = line.slope * float(np.ptp(logs))
    critical = growth > float(_TAUBERIAN["critical_share"]) * float(np.mean(values))
    if not critical:
        logger.info("K_cos samples stay flat against |log w|; the kernel does not look critical")
    return TauberianEstimate(
        c1=line.slope,
        intercept=line.intercept,
        residual=line.residual,
        critical=bool(critical),
        samples=int(omegas.size),
        decades=span,
    )


def _exponent_fit(name: str, omegas: np.ndarray, deviations: np.ndarray, theory: float, slack: float) -> RateFit:
    usable = deviations > 0
    if np.count_nonzero(usable) < 3:
        # deviation below resolution everywhere: decay is at least as fast as claimed
        return RateFit(name, math.inf, theory, True)
    fit = fit_power_law(omegas[usable], deviations[usable])
    return RateFit(name, fit.slope, theory, fit.slope >= theory - slack)


def small_frequency_rates(
    kernel: MemoryKernel,
    tol: float | None = None,
    omegas: Sequence[float] | None = None,
    threads: int | None = None,
) -> RateReport:
    """Fit the decay exponents of the regime's small-frequency deviation quantities."""
    regime = kernel.regime
    tol = float(_RATES["tol"]) if tol is None else tol
    slack = float(_RATES["slack"])

    if isinstance(regime, Diffusive):
        grid = np.asarray(omegas, dtype=float) if omegas is not None else _grid_from(_RATES["diffusive_grid"])
        cos_values, sin_values = _transforms(kernel, grid, tol, threads)
        k0 = kernel_integral(kernel, tol).value
        fits = [
            _exponent_fit("|K_cos(w) - K_cos(0)|", grid, np.abs(cos_values - k0), regime.gamma0, slack),
            _exponent_fit("|K_sin(w)|", grid, np.abs(sin_values), regime.gamma01, slack),
        ]
        return RateReport(regime.name, grid.tolist(), fits)

    if isinstance(regime, Subdiffusive):
        grid = np.asarray(omegas, dtype=float) if omegas is not None else _grid_from(_RATES["subdiffusive_grid"])
        cos_values, sin_values = _transforms(kernel, grid, tol, threads)
        i_c, i_s = oscillatory_moments(regime.alpha)
        scale = np.power(grid, 1.0 - regime.alpha)
        fits = [
            _exponent_fit(
                "|w^(1-a) K_cos(w) - C_a I_c|",
                grid,
                np.abs(scale * cos_values - regime.c_alpha * i_c),
                regime.gamma_alpha,
                slack,
            ),
            _exponent_fit(
                "|w^(1-a) K_sin(w) - C_a I_s|",
                grid,
                np.abs(scale * sin_values - regime.c_alpha * i_s),
                regime.gamma_alpha,
                slack,
            ),
        ]
        return RateReport(regime.name, grid.tolist(), fits)

    if isinstance(regime, Critical):
        grid = np.asarray(omegas, dtype=float) if omegas is not None else _grid_from(_RATES["critical_grid"])
        cos_values, _ = _transforms(kernel, grid, tol, threads)
        logs = np.abs(np.log(grid))
        product = np.abs(cos_values / logs - regime.c1) * logs
        sup = float(np.max(product))
        return RateReport(regime.name, grid.tolist(), [], sup, sup < float(_RATES["critical_bound"]))

    raise InvalidInputError(f"Small-frequency rates need a classified kernel, {kernel.name} is unclassified")


def oscillatory_moments(alpha: float) -> tuple[float, float]:
    """(int_0^inf cos z / z^a dz, int_0^inf sin z / z^a dz) for 0 < a < 1."""
    if not 0.0 < alpha < 1.0:
        raise InvalidInputError(f"The oscillatory moments need 0 < alpha < 1, got {alpha}")
    g = float(gamma(1.0 - alpha))
    return g * math.sin(0.5 * alpha * math.pi), g * math.cos(0.5 * alpha * math.pi)


@dataclass(frozen=True)
class IncrementCheck:
    lam: float
    omegas: list[float]
    increments: list[float]
    expected: float
    max_deviation: float
    final_deviation: float
    passed: bool


def log_increment_check(
    kernel: MemoryKernel,
    lam: float = 2.0,
    omegas: Sequence[float] | None = None,
    tol: float | None = None,
    threads: int | None = None,
) -> IncrementCheck:
    """K_cos(w) - K_cos(lam w) against C1 log(lam) for a critical kernel as w -> 0."""
    if not isinstance(kernel.regime, Critical):
        raise InvalidInputError("The log-increment check applies to critical kernels only")
    if not lam > 1:
        raise InvalidInputError(f"lam must exceed 1, got {lam}")
    tol = float(DEFAULTS["tol"]) if tol is None else tol
    grid = np.asarray(omegas, dtype=float) if omegas is not None else np.geomspace(1e-6, 1e-3, 7)
    both = np.concatenate([grid, lam * grid])
    values = np.array([v.value for v in ordered_map(lambda w: kcos(kernel, w, tol), both.tolist(), threads)])
    increments = values[: grid.size] - values[grid.size :]
    expected = kernel.regime.c1 * math.log(lam)
    deviation = np.abs(increments - expected)
    final = float(deviation[np.argmin(grid)])
    return IncrementCheck(
        lam=lam,
        omegas=grid.tolist(),
        increments=increments.tolist(),
        expected=expected,
        max_deviation=float(deviation.max()),
        final_deviation=final,
        passed=final <= 0.05 * expected,
    )


@dataclass(frozen=True)
class GapReport:
    omegas: list[float]
    gaps: list[float]
    spread: float
    bounded: bool


def _integral_to(kernel: MemoryKernel, upper: float, tol: float) -> float:
    if kernel.singular_at_origin:
        t0 = min(1.0, upper)
        head = integrate_singular_origin(kernel.evaluate, t0, kernel.singularity_exponent, 0.5 * tol)
        rest = integrate(kernel.evaluate, geometric_edges(t0, upper, t0), 0.5 * tol)
        return math.fsum([head.value, rest.value])
    return integrate(kernel.evaluate, geometric_edges(0.0, upper, min(0.0625, 0.5 * upper)), tol).value


def truncated_integral_gap(
    kernel: MemoryKernel,
    omegas: Sequence[float] | None = None,
    tol: float | None = None,
    threshold: float | None = None,
    threads: int | None = None,
) -> GapReport:
    """K_cos(w) - int_0^(1/w) K(t) dt per frequency; bounded when its spread stays below ``threshold``."""
    tol = float(DEFAULTS["tol"]) if tol is None else tol
    threshold = float(DEFAULTS.get("gap_threshold", 1.0)) if threshold is None else threshold
    grid = np.asarray(omegas, dtype=float) if omegas is not None else np.geomspace(1e-6, 1e-2, 9)

    def gap(w: float) -> float:
        return kcos(kernel, w, tol).value - _integral_to(kernel, 1.0 / w, tol)

    gaps = np.array(ordered_map(gap, grid.tolist(), threads))
    spread = float(np.ptp(gaps))
    return GapReport(grid.tolist(), gaps.tolist(), spread, spread < threshold)
