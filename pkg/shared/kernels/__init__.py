from .base import Critical, Diffusive, MemoryKernel, RegimeTag, Subdiffusive, TransformPair, Unclassified
from .exponential import make_exponential
from .power_law import make_power_law, make_pure_power
from .registry import KernelRegistry, tail_from_section
from .tabulated import make_tabulated

__all__ = [
    "Critical",
    "Diffusive",
    "KernelRegistry",
    "MemoryKernel",
    "RegimeTag",
    "Subdiffusive",
    "TransformPair",
    "Unclassified",
    "make_exponential",
    "make_power_law",
    "make_pure_power",
    "make_tabulated",
    "tail_from_section",
]
