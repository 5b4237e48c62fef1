import numpy as np

from shared.errors import InvalidInputError

from .base import Diffusive, MemoryKernel


def make_exponential(lam: float = 1.0) -> MemoryKernel:
    """K(t) = exp(-lam * t).

    t**beta0 * K(t) is integrable for every beta0 > 0, and the rate estimates
    only consume gamma0 = min(beta0, 2), so the tag carries the effective beta0 = 2.
    """
    if not lam > 0:
        raise InvalidInputError(f"Exponential kernel rate must be positive, got lambda={lam}")
    lam = float(lam)

    def evaluate(t: np.ndarray) -> np.ndarray:
        return np.exp(-lam * np.abs(t))

    def kcos(omega: float) -> float:
        return lam / (lam * lam + omega * omega)

    def ksin(omega: float) -> float:
        return omega / (lam * lam + omega * omega)

    return MemoryKernel(
        name="exponential",
        evaluate=evaluate,
        regime=Diffusive(beta0=2.0),
        closed_form_transforms=(kcos, ksin),
        parameters={"lambda": lam},
    )
