"""Improper cosine and sine transforms of memory kernels.

K_cos(w) = int_0^inf K(t) cos(w t) dt and K_sin(w) = int_0^inf K(t) sin(w t) dt
are split at the zeros of the trigonometric factor. The head up to the first
zero past the decrease onset is integrated adaptively (through u = t**(1-a)
near a t**(-a) singularity); the remaining half-period panels form an
alternating series that is summed either by Euler acceleration or by plain
truncation with the remainder bound 4 K(T) / |w|, whichever certifies the
smaller error.
"""

import logging
import math
from collections.abc import Sequence
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Any, Literal, NamedTuple

import numpy as np

from shared.errors import DivergenceError, InvalidInputError, LabError
from shared.kernels import Diffusive, MemoryKernel
from shared.numerics import (
    euler_accelerate,
    geometric_edges,
    integrate,
    integrate_panels,
    integrate_singular_origin,
)
from shared.utils.file_loader import load_stage_defaults
from shared.utils.parallel import ordered_map

logger = logging.getLogger(__name__)

DEFAULTS = load_stage_defaults(
    Path(__file__).with_name("defaults.yaml"),
    {"tol": 1e-8, "batch": 16, "max_terms": 8192, "max_depth": 40, "head_first_split": 0.0625},
)

Kind = Literal["cos", "sin"]


@dataclass(frozen=True)
class TransformValue:
    omega: float
    value: float
    abs_error: float
    # T where panel integration stopped
    cutoff_time: float
    # 4 K(T) / |omega| when the truncated sum was the better certificate, else 0
    tail_bound: float
    converged: bool = True
    method: str = "euler"

    def as_dict(self) -> dict[str, Any]:
        return asdict(self)


class TransformRow(NamedTuple):
    omega: float
    kcos: TransformValue | None
    ksin: TransformValue | None
    error: str | None = None


def tail_remainder_bound(kernel: MemoryKernel, T: float, omega: float) -> float:
    """Bound 4 K(T) / |omega| on |int_T^inf K(t) cos(omega t) dt| (and the sine analog)."""
    if omega == 0:
        raise InvalidInputError("The tail bound needs omega != 0")
    if T < kernel.decrease_onset:
        raise InvalidInputError(f"T={T} lies before the decrease onset {kernel.decrease_onset} of {kernel.name}")
    if T <= 0 and kernel.singular_at_origin:
        raise InvalidInputError("T must be positive for a kernel singular at the origin")
    return 4.0 * kernel.value(T) / abs(omega)


def _first_zero(kind: Kind, omega: float, start: float) -> tuple[int, float]:
    offset = 0.5 * math.pi if kind == "cos" else 0.0
    k = math.ceil((start * omega - offset) / math.pi)
    k = max(k, 0 if kind == "cos" else 1)
    while (offset + k * math.pi) / omega < start:
        k += 1
    return k, (offset + k * math.pi) / omega


def _head_integral(kernel: MemoryKernel, integrand, omega: float, head_end: float, tol: float, max_depth: int):
    if kernel.singular_at_origin:
        t0 = min(1.0, 0.5 * math.pi / omega)
        origin = integrate_singular_origin(integrand, t0, kernel.singularity_exponent, 0.5 * tol, max_depth)
        rest = integrate(integrand, geometric_edges(t0, head_end, t0), 0.5 * tol, max_depth)
        return (
            math.fsum([origin.value, rest.value]),
            origin.abs_error + rest.abs_error,
            origin.converged and rest.converged,
        )
    first = min(float(DEFAULTS["head_first_split"]), 0.5 * head_end)
    result = integrate(integrand, geometric_edges(0.0, head_end, first), tol, max_depth)
    return result.value, result.abs_error, result.converged


def _oscillatory(kernel: MemoryKernel, omega: float, tol: float, kind: Kind) -> TransformValue:
    if not tol > 0:
        raise InvalidInputError(f"Tolerance must be positive, got {tol}")
    w = abs(float(omega))
    trig = np.cos if kind == "cos" else np.sin
    batch = int(DEFAULTS["batch"])
    max_terms = int(DEFAULTS["max_terms"])
    max_depth = int(DEFAULTS["max_depth"])

    def integrand(t: np.ndarray) -> np.ndarray:
        return kernel.evaluate(t) * trig(w * t)

    start = kernel.decrease_onset
    if kernel.singular_at_origin:
        start = max(start, min(1.0, 0.5 * math.pi / w))
    k, head_end = _first_zero(kind, w, start)
    head_value, head_error, converged = _head_integral(kernel, integrand, w, head_end, 0.25 * tol, max_depth)

    offset = 0.5 * math.pi if kind == "cos" else 0.0
    terms: list[float] = []
    panel_errors: list[float] = []
    series_value, series_error, method, tail_bound = 0.0, math.inf, "euler", 0.0
    cutoff = head_end
    while len(terms) < max_terms:
        edges = (offset + np.arange(k, k + batch + 1) * math.pi) / w
        values, errors, ok = integrate_panels(integrand, edges, 0.125 * tol, max_depth)
        converged = converged and ok
        terms.extend(values.tolist())
        panel_errors.extend(errors.tolist())
        k += batch
        cutoff = float(edges[-1])

        euler_value, euler_error = euler_accelerate(terms)
        bound = tail_remainder_bound(kernel, cutoff, w)
        if bound < euler_error:
            series_value, series_error, method, tail_bound = math.fsum(terms), bound, "truncation", bound
        else:
            series_value, series_error, method, tail_bound = euler_value, euler_error, "euler", 0.0
        if series_error <= 0.5 * tol:
            break
    else:
        converged = False
        logger.warning(
            "K_%s(%g) of %s: series error %.3g above %.3g after %d panels",
            kind,
            w,
            kernel.name,
            series_error,
            0.5 * tol,
            len(terms),
        )

    value = math.fsum([head_value, series_value])
    abs_error = head_error + math.fsum(panel_errors) + series_error
    if kind == "sin" and omega < 0:
        value = -value
    logger.debug("K_%s(%g) = %.15g +- %.3g (%s, T=%g)", kind, omega, value, abs_error, method, cutoff)
    return TransformValue(
        omega=float(omega),
        value=value,
        abs_error=abs_error,
        cutoff_time=cutoff,
        tail_bound=tail_bound,
        converged=converged,
        method=method,
    )


def kernel_integral(kernel: MemoryKernel, tol: float | None = None) -> TransformValue:
    """K_cos(0), the total integral of an integrable (diffusive) kernel."""
    tol = float(DEFAULTS["tol"]) if tol is None else tol
    if not isinstance(kernel.regime, Diffusive):
        raise DivergenceError(
            f"K_cos(0) diverges for the {kernel.regime.name} kernel {kernel.name}; "
            "only diffusive kernels are integrable"
        )
    if kernel.has_closed_form:
        return TransformValue(
            omega=0.0,
            value=kernel.closed_form_kcos(0.0),
            abs_error=0.0,
            cutoff_time=math.inf,
            tail_bound=0.0,
            method="closed_form",
        )

    max_depth = int(DEFAULTS["max_depth"])
    first = float(DEFAULTS["head_first_split"])
    edges = geometric_edges(0.0, max(1.0, 2.0 * kernel.decrease_onset), first)
    values, errors, converged = integrate_panels(kernel.evaluate, edges, 0.25 * tol, max_depth)
    pieces, piece_errors = values.tolist(), errors.tolist()
    remainder = math.inf
    end = float(edges[-1])
    while end < 1e300:
        ratio = pieces[-1] / pieces[-2] if pieces[-2] > 0 else 0.0
        remainder = pieces[-1] * ratio / (1.0 - ratio) if ratio < 1.0 else math.inf
        if remainder <= 0.5 * tol:
            break
        more = end * 2.0 ** np.arange(0, 9)
        values, errors, ok = integrate_panels(kernel.evaluate, more, 0.125 * tol, max_depth)
        converged = converged and ok
        pieces.extend(values.tolist())
        piece_errors.extend(errors.tolist())
        end = float(more[-1])
    if not math.isfinite(remainder):
        raise DivergenceError(f"The integral of {kernel.name} does not settle; is the kernel integrable?")
    if remainder > 0.5 * tol:
        converged = False
        logger.warning("Integral of %s: tail estimate %.3g above %.3g", kernel.name, remainder, 0.5 * tol)
    return TransformValue(
        omega=0.0,
        value=math.fsum(pieces),
        abs_error=math.fsum(piece_errors) + remainder,
        cutoff_time=end,
        tail_bound=0.0,
        converged=converged,
        method="geometric_panels",
    )


def kcos(kernel: MemoryKernel, omega: float, tol: float | None = None) -> TransformValue:
    """K_cos(omega); even in omega. omega = 0 is the kernel integral."""
    tol = float(DEFAULTS["tol"]) if tol is None else tol
    if omega == 0:
        return kernel_integral(kernel, tol)
    value = _oscillatory(kernel, abs(omega), tol, "cos")
    if omega < 0:
        value = TransformValue(**{**value.as_dict(), "omega": float(omega)})
    return value


def ksin(kernel: MemoryKernel, omega: float, tol: float | None = None) -> TransformValue:
    """K_sin(omega); odd in omega."""
    tol = float(DEFAULTS["tol"]) if tol is None else tol
    if omega == 0:
        return TransformValue(omega=0.0, value=0.0, abs_error=0.0, cutoff_time=0.0, tail_bound=0.0, method="exact")
    return _oscillatory(kernel, omega, tol, "sin")


def validate_grid(omegas: Sequence[float] | np.ndarray, name: str = "omega") -> np.ndarray:
    grid = np.asarray(omegas, dtype=float).ravel()
    if grid.size and not np.all(np.isfinite(grid)):
        raise InvalidInputError(f"The {name} grid contains non-finite values")
    if grid.size and grid[0] <= 0:
        raise InvalidInputError(f"The {name} grid must be positive")
    if np.any(np.diff(grid) <= 0):
        raise InvalidInputError(f"The {name} grid must be strictly increasing")
    return grid


def transform_grid(
    kernel: MemoryKernel,
    omegas: Sequence[float] | np.ndarray,
    tol: float | None = None,
    threads: int | None = None,
) -> list[TransformRow]:
    """kcos and ksin at every grid point; a failing point is recorded, not raised."""
    grid = validate_grid(omegas)

    def one(omega: float) -> TransformRow:
        try:
            return TransformRow(float(omega), kcos(kernel, omega, tol), ksin(kernel, omega, tol))
        except LabError as e:
            logger.error("Transform of %s failed at omega=%g: %s", kernel.name, omega, e)
            return TransformRow(float(omega), None, None, str(e))

    rows = ordered_map(one, grid.tolist(), threads)
    logger.info("Transformed %s on %d frequencies", kernel.name, len(rows))
    return rows
