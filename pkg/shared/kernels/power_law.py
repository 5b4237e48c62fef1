import math

import numpy as np
from scipy.special import gamma, sici

from shared.errors import InvalidInputError

from .base import Critical, MemoryKernel, Subdiffusive


def make_power_law(alpha: float, scale: float = 1.0) -> MemoryKernel:
    """K(t) = scale * (1 + t)**(-alpha), 0 < alpha <= 1.

    The shift keeps K locally integrable while t**alpha * K(t) -> scale at rate
    1/t. alpha = 1 is the critical kernel; its transforms have closed forms in
    the sine and cosine integrals.
    """
    if not 0.0 < alpha <= 1.0:
        raise InvalidInputError(f"Power-law exponent must lie in (0, 1], got alpha={alpha}")
    if not scale > 0:
        raise InvalidInputError(f"Power-law scale must be positive, got {scale}")
    alpha = float(alpha)
    scale = float(scale)

    def evaluate(t: np.ndarray) -> np.ndarray:
        return scale * np.power(1.0 + np.abs(t), -alpha)

    if alpha == 1.0:

        def kcos(omega: float) -> float:
            si, ci = sici(omega)
            return scale * (-math.cos(omega) * ci + math.sin(omega) * (0.5 * math.pi - si))

        def ksin(omega: float) -> float:
            si, ci = sici(omega)
            return scale * (math.cos(omega) * (0.5 * math.pi - si) + math.sin(omega) * ci)

        return MemoryKernel(
            name="power_law",
            evaluate=evaluate,
            regime=Critical(c1=scale, beta1=1.0),
            closed_form_transforms=(kcos, ksin),
            parameters={"alpha": alpha, "scale": scale},
        )

    return MemoryKernel(
        name="power_law",
        evaluate=evaluate,
        regime=Subdiffusive(alpha=alpha, c_alpha=scale, beta_alpha=1.0),
        parameters={"alpha": alpha, "scale": scale},
    )


def make_pure_power(alpha: float) -> MemoryKernel:
    """K(t) = t**(-alpha), 0 < alpha < 1, singular at the origin."""
    if not 0.0 < alpha < 1.0:
        raise InvalidInputError(
            f"Pure power kernel needs 0 < alpha < 1 (t**-alpha is not locally integrable for alpha >= 1), got {alpha}"
        )
    alpha = float(alpha)
    amplitude = float(gamma(1.0 - alpha))
    cos_factor = math.sin(0.5 * alpha * math.pi)
    sin_factor = math.cos(0.5 * alpha * math.pi)

    def evaluate(t: np.ndarray) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return np.power(np.abs(t), -alpha)

    def kcos(omega: float) -> float:
        return omega ** (alpha - 1.0) * amplitude * cos_factor

    def ksin(omega: float) -> float:
        return omega ** (alpha - 1.0) * amplitude * sin_factor

    return MemoryKernel(
        name="pure_power",
        evaluate=evaluate,
        regime=Subdiffusive(alpha=alpha, c_alpha=1.0, beta_alpha=math.inf),
        singular_at_origin=True,
        singularity_exponent=alpha,
        closed_form_transforms=(kcos, ksin),
        parameters={"alpha": alpha},
    )
