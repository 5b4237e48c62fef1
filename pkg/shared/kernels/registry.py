import logging
from collections.abc import Callable, Mapping
from pathlib import Path
from typing import Any

from shared.errors import InvalidInputError

from .base import Critical, Diffusive, MemoryKernel, RegimeTag, Subdiffusive, Unclassified
from .exponential import make_exponential
from .power_law import make_power_law, make_pure_power
from .tabulated import make_tabulated

logger = logging.getLogger(__name__)

KernelFactory = Callable[[Mapping[str, Any]], MemoryKernel]


def _float(section: Mapping[str, Any], key: str, default: float | None = None) -> float:
    raw = section.get(key, default)
    if raw is None:
        raise InvalidInputError(f"Missing kernel.{key}")
    try:
        return float(raw)
    except (TypeError, ValueError) as e:
        raise InvalidInputError(f"kernel.{key} must be a number, got {raw!r}") from e


def tail_from_section(section: Mapping[str, Any]) -> RegimeTag:
    """Build the regime tag of a tabulated kernel from ``kernel.tail`` and its parameters."""
    tail = str(section.get("tail", "unclassified")).strip().lower()
    if tail == "diffusive":
        return Diffusive(beta0=_float(section, "beta0", 2.0))
    if tail == "subdiffusive":
        return Subdiffusive(
            alpha=_float(section, "alpha"),
            c_alpha=_float(section, "c_alpha", 1.0),
            beta_alpha=_float(section, "beta_alpha", 1.0),
        )
    if tail == "critical":
        return Critical(c1=_float(section, "c1", 1.0), beta1=_float(section, "beta1", 1.0))
    if tail == "unclassified":
        return Unclassified()
    raise InvalidInputError(f"Unknown kernel.tail {tail!r}")


def _exponential(section: Mapping[str, Any]) -> MemoryKernel:
    return make_exponential(_float(section, "lambda", 1.0))


def _power_law(section: Mapping[str, Any]) -> MemoryKernel:
    return make_power_law(_float(section, "alpha"), _float(section, "scale", 1.0))


def _pure_power(section: Mapping[str, Any]) -> MemoryKernel:
    return make_pure_power(_float(section, "alpha"))


def _tabulated(section: Mapping[str, Any]) -> MemoryKernel:
    from shared.utils.file_loader import load_kernel_table

    path = section.get("table_path")
    if not path:
        raise InvalidInputError("kernel.table_path is required for the tabulated family")
    onset = _float(section, "decrease_onset", 0.0)
    return make_tabulated(load_kernel_table(Path(str(path))), tail_from_section(section), onset)


class KernelRegistry:
    """Family-name to factory dispatch for kernels declared in run configs.

    ``KernelRegistry.instance()`` returns the process-wide registry holding
    the built-in families; ``register`` admits further ones.
    """

    _instance: "KernelRegistry | None" = None

    def __init__(self) -> None:
        self._factories: dict[str, KernelFactory] = {
            "exponential": _exponential,
            "power_law": _power_law,
            "pure_power": _pure_power,
            "tabulated": _tabulated,
        }

    @classmethod
    def instance(cls) -> "KernelRegistry":
        if cls._instance is None:
            cls._instance = cls()
        return cls._instance

    def register(self, family: str, factory: KernelFactory) -> None:
        if family in self._factories:
            logger.warning("Replacing kernel family %s", family)
        self._factories[family] = factory

    def families(self) -> list[str]:
        return sorted(self._factories)

    def create(self, family: str, section: Mapping[str, Any] | None = None) -> MemoryKernel:
        factory = self._factories.get(family)
        if factory is None:
            raise InvalidInputError(f"Unknown kernel family {family!r}; known: {', '.join(self.families())}")
        kernel = factory(section or {})
        logger.debug("Built kernel %s with %s", kernel.name, kernel.parameters)
        return kernel

    def from_config(self, section: Mapping[str, Any]) -> MemoryKernel:
        """Build the kernel described by a ``kernel.*`` config section (keys without the prefix)."""
        family = section.get("family")
        if not family:
            raise InvalidInputError("kernel.family is required")
        return self.create(str(family).strip().lower(), section)
