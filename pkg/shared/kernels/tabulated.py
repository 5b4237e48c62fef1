import logging
from collections.abc import Sequence

import numpy as np

from shared.errors import InvalidInputError

from .base import Critical, Diffusive, MemoryKernel, RegimeTag, Subdiffusive

logger = logging.getLogger(__name__)

MIN_SAMPLES = 8
_LOG_FLOOR = 1e-300


def _tail_extrapolator(tail: RegimeTag, t_end: float, k_end: float):
    """Continuation of the table beyond its last sample, shaped by the declared regime."""
    if isinstance(tail, Diffusive):
        # t**beta0 * K stays integrable
        power = tail.beta0 + 2.0
        return lambda q: k_end * np.power(q / t_end, -power)
    if isinstance(tail, Subdiffusive):
        return lambda q: k_end * np.power(q / t_end, -tail.alpha)
    if isinstance(tail, Critical):
        return lambda q: k_end * t_end / q
    return None


def make_tabulated(
    samples: Sequence[tuple[float, float]] | np.ndarray, tail: RegimeTag, decrease_onset: float = 0.0
) -> MemoryKernel:
    """Memory kernel from a table of (t, K(t)) pairs.

    Interpolation is linear in log-log space, so power-law stretches are
    reproduced exactly; a leading t = 0 sample is joined linearly. Queries
    below the first sample hold the first value; queries beyond the last
    sample follow the regime-tag extrapolation. ``decrease_onset`` is the declared
    time after which K must be non-increasing; it is not derived from the samples.
    """
    table = np.asarray(samples, dtype=float)
    if table.ndim != 2 or table.shape[1] != 2:
        raise InvalidInputError("Kernel table must be a list of (t, K) pairs")
    if table.shape[0] < MIN_SAMPLES:
        raise InvalidInputError(f"Kernel table needs at least {MIN_SAMPLES} samples, got {table.shape[0]}")
    if not np.all(np.isfinite(table)):
        raise InvalidInputError("Kernel table contains non-finite entries")
    times, values = table[:, 0].copy(), table[:, 1].copy()
    if times[0] < 0:
        raise InvalidInputError("Kernel table times must be nonnegative")
    if np.any(np.diff(times) <= 0):
        raise InvalidInputError("Kernel table times must be strictly increasing")
    if np.any(values < 0):
        raise InvalidInputError("Kernel table values must be nonnegative")
    onset = float(decrease_onset)
    if not 0.0 <= onset < float(times[-1]):
        raise InvalidInputError(f"Decrease onset must lie in [0, {times[-1]:g}), got {decrease_onset}")

    positive = times > 0
    log_t = np.log(times[positive])
    log_k = np.log(np.maximum(values[positive], _LOG_FLOOR))
    t_first_pos = times[positive][0]
    has_origin = times[0] == 0.0
    t_end, k_end = float(times[-1]), float(values[-1])
    extrapolate = _tail_extrapolator(tail, t_end, k_end)

    def evaluate(t: np.ndarray) -> np.ndarray:
        q = np.abs(np.asarray(t, dtype=float))
        out = np.full(q.shape, values[0])
        beyond = q > t_end
        if np.any(beyond):
            if extrapolate is None:
                raise InvalidInputError(
                    f"Query t={float(q[beyond].max())} lies beyond the table end {t_end} and the tail is unclassified"
                )
            out[beyond] = extrapolate(q[beyond])
        loglog = (q >= t_first_pos) & ~beyond
        if np.any(loglog):
            out[loglog] = np.exp(np.interp(np.log(q[loglog]), log_t, log_k))
        if has_origin:
            head = (q > 0) & (q < t_first_pos)
            if np.any(head):
                out[head] = np.interp(q[head], times[:2], values[:2])
        return out

    logger.debug("Tabulated kernel: %d samples up to t=%g, decrease onset %g", table.shape[0], t_end, onset)
    return MemoryKernel(
        name="tabulated",
        evaluate=evaluate,
        regime=tail,
        decrease_onset=onset,
        parameters={"samples": int(table.shape[0]), "t_end": t_end},
    )
