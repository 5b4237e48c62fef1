import functools
import logging
import math

import numpy as np
from scipy.interpolate import CubicSpline

from shared.errors import InvalidInputError
from shared.kernels import Critical, Subdiffusive
from shared.numerics import QuadratureResult, integrate, integrate_panels

from .spectral import DEFAULTS, SpectralModel, rhat_grid

logger = logging.getLogger(__name__)

_TABLE = {"omega_lo": 1e-8, "omega_hi": 1e3, "points_per_decade": 48, **DEFAULTS.get("table", {})}


class SpectralTable:
    """r tabulated once on a log grid and interpolated by a cubic spline in (log w, log r).

    Below the grid the regime's small-frequency law continues the last value
    (constant, w^(1-a) or 1/|log w|); above it r decays like w^-2.
    ``relative_error`` combines the transform errors at the nodes with an
    interpolation estimate from a spline through every second node;
    ``absolute_error`` is the same estimate in units of r.
    """

    def __init__(
        self,
        model: SpectralModel,
        omega_lo: float | None = None,
        omega_hi: float | None = None,
        points_per_decade: int | None = None,
        tol: float | None = None,
        threads: int | None = None,
    ):
        lo = float(_TABLE["omega_lo"] if omega_lo is None else omega_lo)
        hi = float(_TABLE["omega_hi"] if omega_hi is None else omega_hi)
        per_decade = int(_TABLE["points_per_decade"] if points_per_decade is None else points_per_decade)
        if not 0 < lo < min(hi, 1.0):
            raise InvalidInputError(f"Spectral table needs 0 < omega_lo < min(omega_hi, 1), got {lo}, {hi}")
        if per_decade < 4:
            raise InvalidInputError("Spectral table needs at least 4 points per decade")
        n = int(round(math.log10(hi / lo) * per_decade)) + 1
        if n % 2 == 0:
            n += 1

        self.model = model
        self.omegas = np.geomspace(lo, hi, n)
        values = rhat_grid(model, self.omegas, tol, threads)
        self.values = np.array([v.rhat for v in values])
        self.errors = np.array([v.abs_error for v in values])
        self.omega_lo, self.omega_hi = lo, hi

        x, y = np.log(self.omegas), np.log(self.values)
        self._spline = CubicSpline(x, y)
        coarse = CubicSpline(x[::2], y[::2])
        coarse_error = np.abs(np.expm1(coarse(x[1::2]) - y[1::2]))
        # a cubic spline's error shrinks 16-fold when the spacing halves
        self.interpolation_error = float(np.max(coarse_error)) / 16.0
        self.relative_error = self.interpolation_error + float(np.max(self.errors / self.values))
        self.absolute_error = float(np.max(coarse_error * self.values[1::2])) / 16.0 + float(np.max(self.errors))
        logger.info(
            "Spectral table for %s: %d nodes on [%g, %g], relative error %.3g",
            model.kernel.name,
            n,
            lo,
            hi,
            self.relative_error,
        )

    @property
    def sup(self) -> float:
        return float(np.max(self.values))

    def _below(self, w: np.ndarray) -> np.ndarray:
        regime = self.model.kernel.regime
        first = self.values[0]
        if isinstance(regime, Subdiffusive):
            return first * np.power(w / self.omega_lo, 1.0 - regime.alpha)
        if isinstance(regime, Critical):
            safe = np.where(w > 0, w, self.omega_lo)
            return np.where(w > 0, first * math.log(self.omega_lo) / np.log(safe), 0.0)
        return np.full_like(w, first)

    def __call__(self, omega: np.ndarray | float) -> np.ndarray:
        query = np.asarray(omega, dtype=float)
        w = np.abs(query).ravel()
        out = np.empty_like(w)
        below = w < self.omega_lo
        above = w > self.omega_hi
        inside = ~(below | above)
        if np.any(inside):
            out[inside] = np.exp(self._spline(np.log(w[inside])))
        if np.any(below):
            out[below] = self._below(w[below])
        if np.any(above):
            out[above] = self.values[-1] * np.square(self.omega_hi / w[above])
        return out.reshape(query.shape)

    def _edges(self, a: float, b: float) -> np.ndarray:
        decades = math.log10(self.omega_hi / self.omega_lo)
        inner = np.geomspace(self.omega_lo, self.omega_hi, int(decades * 8) + 1)
        below = self.omega_lo * 10.0 ** -np.arange(1, 40)
        points = np.concatenate([[a, b], inner, below])
        return np.unique(points[(points >= a) & (points <= b)])

    def mass(self, a: float, b: float = math.inf, tol: float = 1e-12) -> QuadratureResult:
        """Integral of r over [a, b], 0 <= a < b <= inf."""
        if not 0 <= a < b:
            raise InvalidInputError(f"Need 0 <= a < b, got {a}, {b}")
        value, error, converged, intervals = 0.0, 0.0, True, 0
        if a < self.omega_hi:
            body = integrate(self, self._edges(a, min(b, self.omega_hi)), tol)
            value, error, converged, intervals = body.value, body.abs_error, body.converged, body.intervals
        if b > self.omega_hi:
            lower = max(a, self.omega_hi)
            upper_term = 0.0 if math.isinf(b) else 1.0 / b
            value += self.values[-1] * self.omega_hi**2 * (1.0 / lower - upper_term)
        return QuadratureResult(value=value, abs_error=error, converged=converged, intervals=intervals)

    def cell_masses(self, edges: np.ndarray, tol: float = 1e-12) -> tuple[np.ndarray, np.ndarray]:
        """Integral of r over every cell [edges[i], edges[i+1]] (cells inside [0, omega_hi])."""
        edges = np.asarray(edges, dtype=float)
        if edges[-1] > self.omega_hi * (1 + 1e-12):
            raise InvalidInputError(f"Frequency cells end at {edges[-1]:g}, beyond the table end {self.omega_hi:g}")
        values, errors, converged = integrate_panels(self, edges, tol)
        if not converged:
            logger.warning("Some spectral cell integrals did not reach %.3g", tol)
        return values, errors


@functools.lru_cache(maxsize=8)
def shared_table(model: SpectralModel, tol: float | None = None) -> SpectralTable:
    """Default-resolution table per model, built once per process."""
    return SpectralTable(model, tol=tol)
