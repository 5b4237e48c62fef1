from .fitting import LineFit, decades, fit_line, fit_power_law
from .quadrature import (
    QuadratureResult,
    geometric_edges,
    gk15,
    integrate,
    integrate_panels,
    integrate_singular_origin,
)
from .series import euler_accelerate, neville_at_zero, richardson_extrapolate

__all__ = [
    "LineFit",
    "QuadratureResult",
    "decades",
    "euler_accelerate",
    "fit_line",
    "fit_power_law",
    "geometric_edges",
    "gk15",
    "integrate",
    "integrate_panels",
    "integrate_singular_origin",
    "neville_at_zero",
    "richardson_extrapolate",
]
