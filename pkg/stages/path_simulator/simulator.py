"""Gaussian paths by spectral synthesis.

Each frequency cell j carries the mass w_j of r over the cell and an
independent pair of standard Gaussians (xi_j, eta_j):

    X(t) = sum_j sqrt(2 w_j) ((1 - cos w_j t) / w_j xi_j + sin(w_j t) / w_j eta_j)

so that E X(t) X(s) = 2 sum_j w_j ((1 - cos w_j t)(1 - cos w_j s) + sin w_j t sin w_j s) / w_j^2,
the discrete version of 1/2 (MSD(t) + MSD(s) - MSD(|t - s|)).
"""

import logging
import math
from collections.abc import Iterator, Sequence
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from shared.errors import InvalidInputError, NumericalError
from shared.utils.file_loader import load_stage_defaults
from shared.utils.parallel import ordered_map
from stages.msd_engine import msd
from stages.oscillatory_transform import validate_grid
from stages.spectral_density import SpectralModel, SpectralTable, shared_table

logger = logging.getLogger(__name__)

DEFAULTS = load_stage_defaults(
    Path(__file__).with_name("defaults.yaml"),
    {
        "modes": 4096,
        "omega_max": 100.0,
        "paths": 1000,
        "bias_budget": 0.05,
        "omega_min_factor": 0.01,
        "log_share": 0.5,
        "cell_tol": 1e-12,
    },
)

SEED_LIMIT = 2**64


@dataclass(frozen=True)
class FrequencyGrid:
    """Hybrid frequency cells: [0, omega_min], log-spaced up to 1, linear up to omega_max."""

    edges: np.ndarray
    nodes: np.ndarray
    weights: np.ndarray
    omega_max: float
    omega_min: float
    log_cells: int
    spacing: str = "hybrid"

    @property
    def modes(self) -> int:
        return int(self.nodes.size)

    def describe(self) -> dict:
        return {
            "modes": self.modes,
            "omega_max": self.omega_max,
            "omega_min": self.omega_min,
            "log_cells": self.log_cells,
            "spacing": self.spacing,
        }

    def variance(self, t: float) -> float:
        """E X(t)^2 implied by the discrete grid."""
        half = 0.5 * self.nodes * t
        return float(math.fsum(8.0 * self.weights * np.square(np.sin(half)) / np.square(self.nodes)))


def build_frequency_grid(
    table: SpectralTable,
    modes: int,
    omega_max: float,
    horizon: float,
    log_share: float | None = None,
    cell_tol: float | None = None,
) -> FrequencyGrid:
    if modes < 4:
        raise InvalidInputError(f"Spectral synthesis needs at least 4 modes, got {modes}")
    if modes < 1024:
        logger.warning("Only %d modes; at least 1024 are recommended", modes)
    if not omega_max > 0 or not math.isfinite(omega_max):
        raise InvalidInputError(f"omega_max must be positive and finite, got {omega_max}")
    log_share = float(DEFAULTS["log_share"]) if log_share is None else log_share
    cell_tol = float(DEFAULTS["cell_tol"]) if cell_tol is None else cell_tol

    log_top = min(1.0, omega_max)
    omega_min = min(float(DEFAULTS["omega_min_factor"]) / horizon, 0.1 * log_top)
    cells = modes - 1
    n_log = cells if omega_max <= 1.0 else min(cells - 1, max(1, int(round(cells * log_share))))
    n_lin = cells - n_log

    log_edges = np.geomspace(omega_min, log_top, n_log + 1)
    pieces = [np.zeros(1), log_edges]
    if n_lin:
        pieces.append(np.linspace(1.0, omega_max, n_lin + 1)[1:])
    edges = np.concatenate(pieces)
    if np.any(np.diff(edges) <= 0):
        raise InvalidInputError(
            f"Degenerate frequency cells for {modes} modes up to omega_max={omega_max:g}; use fewer modes"
        )

    nodes = np.empty(modes)
    nodes[0] = 0.5 * omega_min
    nodes[1 : n_log + 1] = np.sqrt(log_edges[:-1] * log_edges[1:])
    nodes[n_log + 1 :] = 0.5 * (edges[n_log + 1 : -1] + edges[n_log + 2 :])

    weights, _ = table.cell_masses(edges, cell_tol)
    if not np.all(np.isfinite(weights)) or np.any(weights <= 0):
        bad = int(np.count_nonzero(~(weights > 0)))
        raise NumericalError(f"{bad} frequency cells received a non-positive or non-finite spectral mass")
    return FrequencyGrid(edges, nodes, weights, float(omega_max), float(omega_min), n_log)


def spectral_tail_mass(model: SpectralModel, omega_max: float, table: SpectralTable | None = None) -> float:
    """2 * int_{omega_max}^inf r: the spectral mass a grid ending at omega_max leaves out."""
    if not omega_max > 0:
        raise InvalidInputError(f"omega_max must be positive, got {omega_max}")
    table = shared_table(model) if table is None else table
    return 2.0 * table.mass(float(omega_max), math.inf).value


@dataclass(frozen=True)
class PathEnsemble:
    times: np.ndarray
    # shape (paths, len(times)); column 0 is exactly zero
    paths: np.ndarray
    seed: int
    grid: FrequencyGrid

    @property
    def n_paths(self) -> int:
        return int(self.paths.shape[0])

    def index_of(self, t: float) -> int:
        hits = np.flatnonzero(np.isclose(self.times, t, rtol=1e-12, atol=1e-12))
        if hits.size == 0:
            raise InvalidInputError(f"Time {t:g} is not on the ensemble grid")
        return int(hits[0])

    def rows(self) -> Iterator[tuple[int, float, float]]:
        for path_id, path in enumerate(self.paths):
            for t, x in zip(self.times, path, strict=True):
                yield path_id, float(t), float(x)


def validate_path_grid(t_grid: Sequence[float] | np.ndarray) -> np.ndarray:
    grid = np.asarray(t_grid, dtype=float)
    if grid.ndim != 1 or grid.size < 2:
        raise InvalidInputError("Path time grid needs at least two times")
    if grid[0] != 0.0:
        raise InvalidInputError(f"Path time grid must start at t=0, got {grid[0]:g}")
    validate_grid(grid[1:], "time")
    return grid


def _check_bias(model: SpectralModel, table: SpectralTable, grid: FrequencyGrid, times: np.ndarray, budget: float):
    tail = spectral_tail_mass(model, grid.omega_max, table)
    if tail > budget:
        raise InvalidInputError(
            f"Spectral tail mass {tail:.3g} above omega_max={grid.omega_max:g} exceeds the bias budget {budget:g}"
        )
    for t in sorted({float(times[1]), float(times[-1])}):
        reference = msd(model, t, table=table).value
        bias = abs(grid.variance(t) - reference) / reference
        logger.info("Grid variance bias at t=%g: %.3g (budget %g)", t, bias, budget)
        if bias > budget:
            raise InvalidInputError(
                f"{grid.modes} modes give a relative variance bias {bias:.3g} at t={t:g}, "
                f"above the bias budget {budget:g}; increase modes"
            )


def simulate(
    model: SpectralModel,
    t_grid: Sequence[float] | np.ndarray,
    modes: int | None = None,
    omega_max: float | None = None,
    seed: int | None = None,
    paths: int | None = None,
    bias_budget: float | None = None,
    table: SpectralTable | None = None,
    threads: int | None = None,
) -> PathEnsemble:
    """Draw ``paths`` independent paths on ``t_grid`` (starting at 0).

    Path i uses the i-th child of ``numpy.random.SeedSequence(seed)``, so an
    ensemble is reproduced bit for bit by the seed and the grid alone, whatever
    the thread count.
    """
    if seed is None:
        raise InvalidInputError("Simulation requires a seed")
    if not 0 <= int(seed) < SEED_LIMIT:
        raise InvalidInputError(f"Seed must be a 64-bit unsigned integer, got {seed}")
    times = validate_path_grid(t_grid)
    modes = int(DEFAULTS["modes"] if modes is None else modes)
    omega_max = float(DEFAULTS["omega_max"] if omega_max is None else omega_max)
    paths = int(DEFAULTS["paths"] if paths is None else paths)
    budget = float(DEFAULTS["bias_budget"] if bias_budget is None else bias_budget)
    if paths < 1:
        raise InvalidInputError(f"Need at least one path, got {paths}")
    table = shared_table(model) if table is None else table

    grid = build_frequency_grid(table, modes, omega_max, float(times[-1]))
    _check_bias(model, table, grid, times, budget)

    amplitude = np.sqrt(2.0 * grid.weights) / grid.nodes
    phase = np.outer(times, grid.nodes)
    cos_part = 2.0 * np.square(np.sin(0.5 * phase)) * amplitude
    sin_part = np.sin(phase) * amplitude
    children = np.random.SeedSequence(int(seed)).spawn(paths)

    def draw(child: np.random.SeedSequence) -> np.ndarray:
        rng = np.random.default_rng(child)
        xi = rng.standard_normal(grid.modes)
        eta = rng.standard_normal(grid.modes)
        return cos_part @ xi + sin_part @ eta

    rows = ordered_map(draw, children, threads)
    ensemble = np.vstack(rows)
    ensemble[:, 0] = 0.0
    logger.info(
        "Simulated %d paths of %s on %d times with %d modes (seed %d)",
        paths,
        model.kernel.name,
        times.size,
        grid.modes,
        seed,
    )
    return PathEnsemble(times=times, paths=ensemble, seed=int(seed), grid=grid)
