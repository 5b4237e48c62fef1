"""MSD(t) = 4 int_0^inf (1 - cos t w) / w^2 r(w) dw, evaluated as
4 t int_0^inf (1 - cos z) / z^2 r(z / t) dz.

The z-integral is split at z1 = (periods + 1/2) pi: below z1 the full integrand
is integrated directly; above it (1 - cos z) / z^2 separates into a
non-oscillatory part, integrated in w = z / t up to infinity against the
spectral table, and an oscillatory part summed over half periods of cos z
with Euler acceleration.
"""

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple

import numpy as np

from shared.errors import InvalidInputError, LabError
from shared.numerics import euler_accelerate, integrate, integrate_panels
from shared.utils.file_loader import load_stage_defaults
from shared.utils.parallel import ordered_map
from stages.oscillatory_transform import validate_grid
from stages.spectral_density import SpectralModel, SpectralTable, shared_table

from .asymptote import AsymptoteSpec, asymptotic_constant

logger = logging.getLogger(__name__)

DEFAULTS = load_stage_defaults(
    Path(__file__).with_name("defaults.yaml"),
    {"tol": 1e-7, "direct_periods": 64, "batch": 16, "max_terms": 4096, "z_cap": 1e4},
)


class MsdPoint(NamedTuple):
    t: float
    value: float
    error: float
    converged: bool = True


@dataclass(frozen=True)
class MsdCurve:
    times: np.ndarray
    values: np.ndarray
    errors: np.ndarray
    model: SpectralModel
    asymptote: AsymptoteSpec | None = None
    converged: list[bool] = field(default_factory=list)

    def __len__(self) -> int:
        return int(self.times.size)

    def trend(self) -> np.ndarray:
        if self.asymptote is None:
            return np.full(self.times.shape, math.nan)
        return self.asymptote.g(self.times)

    def ratio(self) -> np.ndarray:
        return self.values / self.trend()

    def window(self, t_min: float, t_max: float) -> "MsdCurve":
        keep = (self.times >= t_min) & (self.times <= t_max)
        return MsdCurve(
            self.times[keep],
            self.values[keep],
            self.errors[keep],
            self.model,
            self.asymptote,
            [c for c, k in zip(self.converged, keep, strict=False) if k],
        )

    def rows(self) -> list[tuple[float, float, float, float, float]]:
        """(t, msd, msd_err, trend, ratio) per time."""
        trend, ratio = self.trend(), self.ratio()
        return [
            (float(t), float(v), float(e), float(g), float(r))
            for t, v, e, g, r in zip(self.times, self.values, self.errors, trend, ratio, strict=True)
        ]


def one_minus_cos_over_square(z: np.ndarray) -> np.ndarray:
    """(1 - cos z) / z^2 in the half-angle form 2 sin^2(z/2) / z^2, equal to 1/2 at z = 0."""
    return 0.5 * np.square(np.sinc(np.asarray(z, dtype=float) / (2.0 * math.pi)))


def msd(
    model: SpectralModel,
    t: float,
    tol: float | None = None,
    table: SpectralTable | None = None,
) -> MsdPoint:
    """MSD at one time with a relative tolerance ``tol``."""
    if not t > 0 or not math.isfinite(t):
        raise InvalidInputError(f"MSD needs a positive finite time, got t={t}")
    rtol = float(DEFAULTS["tol"]) if tol is None else float(tol)
    if not rtol > 0:
        raise InvalidInputError(f"Tolerance must be positive, got {rtol}")
    table = shared_table(model) if table is None else table
    t = float(t)
    converged = True

    def r_of_z(z: np.ndarray) -> np.ndarray:
        return table(z / t)

    def weighted(z: np.ndarray) -> np.ndarray:
        return one_minus_cos_over_square(z) * r_of_z(z)

    # direct part
    periods = int(DEFAULTS["direct_periods"])
    z1 = (periods + 0.5) * math.pi
    edges = np.concatenate([[0.0], math.pi * 2.0 ** -np.arange(20, 0, -1), math.pi * np.arange(1, periods + 1), [z1]])
    # one unrefined pass sets the magnitude the relative tolerance applies to
    rough = integrate(weighted, edges, math.inf, max_depth=0).value
    scale = max(abs(rough), float(table(1.0 / t)[()])) or table.sup
    abs_tol = rtol * scale
    direct = integrate(weighted, edges, 0.25 * abs_tol)
    converged = converged and direct.converged

    # non-oscillatory part, in w = z / t: (1 / t) int_{z1/t}^inf r(w) / w^2 dw
    a = z1 / t
    smooth_value, smooth_error = 0.0, 0.0
    if a < table.omega_hi:
        decades = math.log10(table.omega_hi / a)
        w_edges = np.geomspace(a, table.omega_hi, max(2, int(decades * 8) + 1))
        body = integrate(lambda w: table(w) / np.square(w), w_edges, 0.25 * abs_tol * t)
        smooth_value, smooth_error = body.value, body.abs_error
        converged = converged and body.converged
    start = max(a, table.omega_hi)
    # r(w) = r(w_hi) (w_hi / w)^2 beyond the table
    smooth_value += table.values[-1] * table.omega_hi**2 / (3.0 * start**3)
    smooth_value /= t
    smooth_error /= t

    # oscillatory part: int_{z1}^inf cos z r(z / t) / z^2 dz over half periods
    batch = int(DEFAULTS["batch"])
    max_terms = int(DEFAULTS["max_terms"])
    z_cap = max(float(DEFAULTS["z_cap"]), 10.0 / rtol)

    def oscillating(z: np.ndarray) -> np.ndarray:
        return np.cos(z) * r_of_z(z) / np.square(z)

    terms: list[float] = []
    panel_errors: list[float] = []
    series_value, series_error = 0.0, math.inf
    k = 0
    while len(terms) < max_terms:
        panel_edges = z1 + math.pi * np.arange(k, k + batch + 1)
        values, errors, ok = integrate_panels(oscillating, panel_edges, 0.125 * abs_tol)
        converged = converged and ok
        terms.extend(values.tolist())
        panel_errors.extend(errors.tolist())
        k += batch
        end = float(panel_edges[-1])
        series_value, series_error = euler_accelerate(terms)
        truncation = 4.0 * float(r_of_z(np.array([end]))[0]) / end**2
        if truncation < series_error:
            series_value, series_error = math.fsum(terms), truncation
        if series_error <= 0.25 * abs_tol or end >= z_cap:
            break
    if series_error > 0.25 * abs_tol:
        converged = False

    integral = math.fsum([direct.value, smooth_value, -series_value])
    integral_error = direct.abs_error + smooth_error + math.fsum(panel_errors) + series_error
    value = 4.0 * t * integral
    # int (1 - cos z) / z^2 dz = pi / 2 turns a uniform bound on r into one on the MSD
    table_error = min(table.relative_error * abs(value), 2.0 * math.pi * t * table.absolute_error)
    error = 4.0 * t * integral_error + table_error
    if not converged:
        logger.warning("MSD(%g) of %s: relative error %.3g above %.3g", t, model.kernel.name, error / value, rtol)
    logger.debug("MSD(%g) = %.12g +- %.3g", t, value, error)
    return MsdPoint(t, max(value, 0.0), error, converged)


def msd_curve(
    model: SpectralModel,
    t_grid: Sequence[float] | np.ndarray,
    tol: float | None = None,
    table: SpectralTable | None = None,
    threads: int | None = None,
) -> MsdCurve:
    grid = validate_grid(t_grid, "time")
    asymptote = None
    try:
        asymptote = asymptotic_constant(model)
    except LabError as e:
        logger.info("No trend for %s: %s", model.kernel.name, e)
    if grid.size == 0:
        empty = np.zeros(0)
        return MsdCurve(empty, empty.copy(), empty.copy(), model, asymptote, [])
    table = shared_table(model) if table is None else table
    points = ordered_map(lambda t: msd(model, t, tol, table), grid.tolist(), threads)
    logger.info("MSD curve of %s on %d times", model.kernel.name, len(points))
    return MsdCurve(
        times=grid,
        values=np.array([p.value for p in points]),
        errors=np.array([p.error for p in points]),
        model=model,
        asymptote=asymptote,
        converged=[p.converged for p in points],
    )
