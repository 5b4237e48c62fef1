import math
from collections.abc import Callable
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from shared.errors import InvalidInputError

# (omega -> K_cos(omega), omega -> K_sin(omega)), both for omega > 0
TransformPair = tuple[Callable[[float], float], Callable[[float], float]]


@dataclass(frozen=True)
class RegimeTag:
    """Tail classification of a memory kernel."""

    @property
    def name(self) -> str:
        return "unclassified"

    @property
    def tail_weight(self) -> float | None:
        """Power kappa such that t**kappa * K(t) tends to ``tail_constant``."""
        return None

    @property
    def tail_constant(self) -> float | None:
        return None

    @property
    def rate_exponent(self) -> float | None:
        return None

    def as_dict(self) -> dict[str, Any]:
        return {"name": self.name}


@dataclass(frozen=True)
class Diffusive(RegimeTag):
    beta0: float = 2.0

    def __post_init__(self) -> None:
        if not self.beta0 > 0:
            raise InvalidInputError(f"Diffusive beta0 must be positive, got {self.beta0}")

    @property
    def name(self) -> str:
        return "diffusive"

    @property
    def tail_weight(self) -> float:
        return 1.0

    @property
    def tail_constant(self) -> float:
        return 0.0

    @property
    def gamma0(self) -> float:
        return min(self.beta0, 2.0)

    @property
    def gamma01(self) -> float:
        return min(self.beta0, 1.0)

    def as_dict(self) -> dict[str, Any]:
        return {"name": self.name, "beta0": self.beta0, "gamma0": self.gamma0}


@dataclass(frozen=True)
class Subdiffusive(RegimeTag):
    alpha: float
    c_alpha: float = 1.0
    # math.inf means t**alpha * K(t) equals c_alpha exactly
    beta_alpha: float = 1.0

    def __post_init__(self) -> None:
        if not 0.0 < self.alpha < 1.0:
            raise InvalidInputError(f"Subdiffusive alpha must lie strictly inside (0, 1), got {self.alpha}")
        if not self.c_alpha > 0:
            raise InvalidInputError(f"Subdiffusive c_alpha must be positive, got {self.c_alpha}")
        if not self.beta_alpha > 0:
            raise InvalidInputError(f"Subdiffusive beta_alpha must be positive, got {self.beta_alpha}")

    @property
    def name(self) -> str:
        return "subdiffusive"

    @property
    def tail_weight(self) -> float:
        return self.alpha

    @property
    def tail_constant(self) -> float:
        return self.c_alpha

    @property
    def rate_exponent(self) -> float:
        return self.beta_alpha

    @property
    def gamma_alpha(self) -> float:
        return min(1.0 - self.alpha, self.alpha * self.beta_alpha)

    @property
    def eta(self) -> float:
        return min(self.alpha, 1.0 - self.alpha, self.alpha * self.beta_alpha)

    def as_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "alpha": self.alpha,
            "c_alpha": self.c_alpha,
            "beta_alpha": "exact" if math.isinf(self.beta_alpha) else self.beta_alpha,
            "gamma_alpha": self.gamma_alpha,
            "eta": self.eta,
        }


@dataclass(frozen=True)
class Critical(RegimeTag):
    c1: float = 1.0
    beta1: float = 1.0

    def __post_init__(self) -> None:
        if not self.c1 > 0:
            raise InvalidInputError(f"Critical c1 must be positive, got {self.c1}")
        if not self.beta1 > 0:
            raise InvalidInputError(f"Critical beta1 must be positive, got {self.beta1}")

    @property
    def name(self) -> str:
        return "critical"

    @property
    def tail_weight(self) -> float:
        return 1.0

    @property
    def tail_constant(self) -> float:
        return self.c1

    @property
    def rate_exponent(self) -> float:
        return self.beta1

    def as_dict(self) -> dict[str, Any]:
        return {"name": self.name, "c1": self.c1, "beta1": self.beta1}


@dataclass(frozen=True)
class Unclassified(RegimeTag):
    pass


@dataclass(frozen=True, eq=False)
class MemoryKernel:
    """An evaluatable memory kernel K(t), t > 0, with its regime metadata.

    ``evaluate`` is vectorized over numpy arrays. The symmetric extension
    K(-t) = K(t) is implicit; only t > 0 is ever queried by the transforms.
    Instances are immutable and compare by identity, so they can key caches.
    """

    name: str
    evaluate: Callable[[np.ndarray], np.ndarray]
    regime: RegimeTag
    singular_at_origin: bool = False
    # K(t) ~ t**(-singularity_exponent) as t -> 0+ when singular_at_origin
    singularity_exponent: float = 0.0
    closed_form_transforms: TransformPair | None = None
    decrease_onset: float = 0.0
    parameters: dict[str, Any] = field(default_factory=dict)

    def __call__(self, t: Any) -> np.ndarray:
        return self.evaluate(np.asarray(t, dtype=float))

    def value(self, t: float) -> float:
        return float(self.evaluate(np.asarray([t], dtype=float))[0])

    @property
    def has_closed_form(self) -> bool:
        return self.closed_form_transforms is not None

    def closed_form_kcos(self, omega: float) -> float:
        if self.closed_form_transforms is None:
            raise InvalidInputError(f"Kernel {self.name} has no closed-form transforms")
        return self.closed_form_transforms[0](abs(omega))

    def closed_form_ksin(self, omega: float) -> float:
        if self.closed_form_transforms is None:
            raise InvalidInputError(f"Kernel {self.name} has no closed-form transforms")
        value = self.closed_form_transforms[1](abs(omega))
        return -value if omega < 0 else value

    def describe(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "parameters": dict(self.parameters),
            "singular_at_origin": self.singular_at_origin,
            "regime": self.regime.as_dict(),
        }
