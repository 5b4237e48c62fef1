"""Large-time laws of the MSD per kernel regime.

    diffusive     MSD ~ 2 / (beta K_cos(0)) t,  relative deviation O(t^(-gamma0 / 2))
    subdiffusive  MSD ~ C t^a,                  relative deviation O(t^(-eta / 2))
    critical      MSD ~ 2 / (beta C1) t / log t, relative deviation O(1 / log t)
"""

import logging
import math
from dataclasses import asdict, dataclass
from typing import Any, Literal

import numpy as np
from scipy.special import gamma

from shared.errors import InvalidInputError
from shared.kernels import Critical, Diffusive, Subdiffusive, make_pure_power
from stages.oscillatory_transform import kcos, kernel_integral, ksin, oscillatory_moments
from stages.spectral_density import SpectralModel

logger = logging.getLogger(__name__)

Trend = Literal["t", "t^alpha", "t/log t"]


@dataclass(frozen=True)
class AsymptoteSpec:
    regime: str
    trend: Trend
    constant: float
    # exponent delta in |MSD / g - constant| = O(t^-delta); None for the logarithmic rate
    predicted_rate: float | None
    rate_marker: str
    alpha: float | None = None

    def __post_init__(self) -> None:
        if not self.constant > 0:
            raise InvalidInputError(f"Asymptotic constant must be positive, got {self.constant}")

    def g(self, t: np.ndarray | float) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        if self.trend == "t":
            return t.copy()
        if self.trend == "t^alpha":
            return np.power(t, self.alpha)
        return t / np.log(t)

    def as_dict(self) -> dict[str, Any]:
        return asdict(self)


def subdiffusive_constant(
    alpha: float,
    beta: float = 1.0,
    c_alpha: float = 1.0,
    method: Literal["identity", "expression", "quadrature"] = "identity",
    tol: float = 1e-10,
) -> float:
    """Constant C of MSD ~ C t^a for a kernel with t^a K(t) -> c_alpha.

    ``expression`` evaluates -4 I_c Gamma(-a) cos(a pi / 2) / (pi beta C_a (I_c^2 + I_s^2))
    with the closed-form moments, ``quadrature`` with I_c, I_s computed as the
    transforms of t^-a at w = 1, and ``identity`` the simplification
    2 sin(a pi) / (pi a beta C_a).
    """
    if not 0.0 < alpha < 1.0:
        raise InvalidInputError(f"Subdiffusive constant needs 0 < alpha < 1, got {alpha}")
    if method == "identity":
        return 2.0 * math.sin(alpha * math.pi) / (math.pi * alpha * beta * c_alpha)
    if method == "expression":
        i_c, i_s = oscillatory_moments(alpha)
    elif method == "quadrature":
        pure = make_pure_power(alpha)
        i_c, i_s = kcos(pure, 1.0, tol).value, ksin(pure, 1.0, tol).value
    else:
        raise InvalidInputError(f"Unknown method {method!r}")
    numerator = -4.0 * i_c * float(gamma(-alpha)) * math.cos(0.5 * alpha * math.pi)
    return numerator / (math.pi * beta * c_alpha * (i_c**2 + i_s**2))


def asymptotic_constant(model: SpectralModel, tol: float | None = None) -> AsymptoteSpec:
    regime = model.kernel.regime
    if isinstance(regime, Diffusive):
        k0 = kernel_integral(model.kernel, tol).value
        spec = AsymptoteSpec(
            regime=regime.name,
            trend="t",
            constant=2.0 / (model.beta * k0),
            predicted_rate=0.5 * regime.gamma0,
            rate_marker=f"t^-{0.5 * regime.gamma0:g}",
        )
    elif isinstance(regime, Subdiffusive):
        spec = AsymptoteSpec(
            regime=regime.name,
            trend="t^alpha",
            constant=subdiffusive_constant(regime.alpha, model.beta, regime.c_alpha),
            predicted_rate=0.5 * regime.eta,
            rate_marker=f"t^-{0.5 * regime.eta:g}",
            alpha=regime.alpha,
        )
    elif isinstance(regime, Critical):
        spec = AsymptoteSpec(
            regime=regime.name,
            trend="t/log t",
            constant=2.0 / (model.beta * regime.c1),
            predicted_rate=None,
            rate_marker="1/log t",
        )
    else:
        raise InvalidInputError(f"No asymptotic law for the unclassified kernel {model.kernel.name}")
    logger.info("Asymptote of %s: MSD ~ %.6g %s", model.kernel.name, spec.constant, spec.trend)
    return spec
