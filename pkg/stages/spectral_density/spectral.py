import logging
import math
from collections.abc import Sequence
from dataclasses import asdict, dataclass, replace
from pathlib import Path
from typing import Any

import numpy as np

from shared.errors import InvalidInputError, ModelInvalidError
from shared.kernels import Critical, Diffusive, MemoryKernel, Subdiffusive
from shared.numerics import fit_power_law
from shared.utils.file_loader import load_stage_defaults
from shared.utils.parallel import ordered_map
from stages.oscillatory_transform import kcos, kernel_integral, ksin, oscillatory_moments, validate_grid

logger = logging.getLogger(__name__)

DEFAULTS = load_stage_defaults(Path(__file__).with_name("defaults.yaml"), {"tol": 1e-8})


@dataclass(frozen=True)
class SpectralModel:
    """Reduced GLE m dV = -beta (K * V) dt + F dt with E F(t) F(s) = K(|t - s|)."""

    kernel: MemoryKernel
    m: float = 1.0
    beta: float = 1.0

    def __post_init__(self) -> None:
        if not self.m > 0:
            raise InvalidInputError(f"Mass m must be positive, got {self.m}")
        if not self.beta > 0:
            raise InvalidInputError(f"Drag coefficient beta must be positive, got {self.beta}")

    def describe(self) -> dict[str, Any]:
        return {"m": self.m, "beta": self.beta, "kernel": self.kernel.describe()}


@dataclass(frozen=True)
class SpectralValue:
    omega: float
    rhat: float
    abs_error: float
    kcos: float
    ksin: float
    converged: bool = True

    def upper_bound(self, beta: float) -> float:
        """1 / (pi beta K_cos(omega)), which r never exceeds."""
        return 1.0 / (math.pi * beta * self.kcos)

    def as_dict(self) -> dict[str, Any]:
        return asdict(self)


def compose_rhat(
    model: SpectralModel,
    omega: float,
    kc: float,
    ks: float,
    kc_error: float = 0.0,
    ks_error: float = 0.0,
) -> SpectralValue:
    """r(w) = (1/pi) beta K_cos / ((beta K_cos)^2 + (m w - beta K_sin)^2) with first-order error propagation."""
    if not kc > 0:
        raise ModelInvalidError(
            f"K_cos({omega:g}) = {kc:.6g} <= 0 for {model.kernel.name}: the cosine transform must stay positive"
        )
    w = abs(omega)
    beta, m = model.beta, model.m
    # kc, ks are the transforms at omega; r is even and K_sin odd, so evaluate at |omega|
    ks_at_w = math.copysign(1.0, omega) * ks
    resonance = m * w - beta * ks_at_w
    denominator = (beta * kc) ** 2 + resonance**2
    value = beta * kc / (math.pi * denominator)
    d_kc = beta * (resonance**2 - (beta * kc) ** 2) / (math.pi * denominator**2)
    d_ks = 2.0 * beta**2 * kc * resonance / (math.pi * denominator**2)
    return SpectralValue(
        omega=float(omega),
        rhat=value,
        abs_error=abs(d_kc) * kc_error + abs(d_ks) * ks_error,
        kcos=kc,
        ksin=ks,
    )


def rhat(model: SpectralModel, omega: float, tol: float | None = None) -> SpectralValue:
    """Spectral density of the stationary velocity at omega != 0."""
    if omega == 0:
        raise InvalidInputError("r(0) is never evaluated directly; use rhat_near_zero for the limit")
    tol = float(DEFAULTS["tol"]) if tol is None else tol
    w = abs(float(omega))
    kc = kcos(model.kernel, w, tol)
    ks = ksin(model.kernel, w, tol)
    ks_value = math.copysign(1.0, omega) * ks.value
    value = compose_rhat(model, float(omega), kc.value, ks_value, kc.abs_error, ks.abs_error)
    return replace(value, converged=kc.converged and ks.converged)


def rhat_grid(
    model: SpectralModel,
    omegas: Sequence[float] | np.ndarray,
    tol: float | None = None,
    threads: int | None = None,
) -> list[SpectralValue]:
    grid = validate_grid(omegas)
    values = ordered_map(lambda w: rhat(model, w, tol), grid.tolist(), threads)
    logger.info("Evaluated r on %d frequencies for %s", len(values), model.kernel.name)
    return values


@dataclass(frozen=True)
class NearZeroReport:
    regime: str
    quantity: str
    limit: float
    omegas: list[float]
    observed: list[float]
    relative_deviation: float
    fitted_exponent: float
    theoretical_exponent: float
    passed: bool

    def as_dict(self) -> dict[str, Any]:
        return asdict(self)


def subdiffusive_rhat_coefficient(alpha: float, beta: float, c_alpha: float) -> float:
    """lim r(w) / w^(1-a) = I_c / (pi beta C_a (I_c^2 + I_s^2))."""
    i_c, i_s = oscillatory_moments(alpha)
    return i_c / (math.pi * beta * c_alpha * (i_c**2 + i_s**2))


def _grid(name: str) -> np.ndarray:
    lo, hi, n = DEFAULTS.get("near_zero", {}).get(name, [1e-6, 1e-3, 7])
    return np.geomspace(float(lo), float(hi), int(n))


def rhat_near_zero(
    model: SpectralModel,
    tol: float | None = None,
    omegas: Sequence[float] | None = None,
    threads: int | None = None,
) -> NearZeroReport:
    """Regime asymptote of r at 0+ with a numerical check on a small-frequency grid."""
    regime = model.kernel.regime
    rel = float(DEFAULTS.get("near_zero", {}).get("relative_tolerance", 0.1))
    tol = float(DEFAULTS["tol"]) if tol is None else tol

    if isinstance(regime, Diffusive):
        grid = np.asarray(omegas, dtype=float) if omegas is not None else _grid("diffusive_grid")
        limit = 1.0 / (math.pi * model.beta * kernel_integral(model.kernel, tol).value)
        scale = np.ones_like(grid)
        quantity, theory, abscissa = "r(w)", regime.gamma0, grid
    elif isinstance(regime, Subdiffusive):
        grid = np.asarray(omegas, dtype=float) if omegas is not None else _grid("subdiffusive_grid")
        limit = subdiffusive_rhat_coefficient(regime.alpha, model.beta, regime.c_alpha)
        scale = np.power(grid, regime.alpha - 1.0)
        quantity, theory, abscissa = "r(w) / w^(1-a)", regime.gamma_alpha, grid
    elif isinstance(regime, Critical):
        grid = np.asarray(omegas, dtype=float) if omegas is not None else _grid("critical_grid")
        limit = 1.0 / (math.pi * model.beta * regime.c1)
        scale = np.abs(np.log(grid))
        # the approach is logarithmic: fit against 1 / |log w|
        quantity, theory, abscissa = "|log w| r(w)", 1.0, 1.0 / np.abs(np.log(grid))
    else:
        raise InvalidInputError(f"Near-zero asymptotes need a classified kernel, {model.kernel.name} is unclassified")

    values = np.array([v.rhat for v in rhat_grid(model, grid, tol, threads)])
    observed = values * scale
    deviation = np.abs(observed - limit)
    usable = deviation > 0
    fitted = fit_power_law(abscissa[usable], deviation[usable]).slope if np.count_nonzero(usable) >= 3 else math.inf
    smallest = int(np.argmin(grid))
    relative = float(deviation[smallest] / limit)
    report = NearZeroReport(
        regime=regime.name,
        quantity=quantity,
        limit=limit,
        omegas=grid.tolist(),
        observed=observed.tolist(),
        relative_deviation=relative,
        fitted_exponent=float(fitted),
        theoretical_exponent=float(theory),
        passed=relative <= rel,
    )
    logger.info("Near-zero %s of %s -> %.6g (deviation %.3g)", quantity, model.kernel.name, limit, relative)
    return report
