from collections.abc import Sequence

import numpy as np

# partial sums fed to the averaging scheme
EULER_WINDOW = 24


def _averaged(partial_sums: np.ndarray) -> float:
    s = partial_sums
    while s.size > 1:
        s = 0.5 * (s[:-1] + s[1:])
    return float(s[0])


def euler_accelerate(terms: Sequence[float] | np.ndarray, window: int = EULER_WINDOW) -> tuple[float, float]:
    """Sum of an alternating series by iterated averaging of its last partial sums.

    Returns (estimate, error) where the error is the largest change of the
    estimate when the last one or two terms are dropped.
    """
    terms = np.asarray(terms, dtype=float)
    if terms.size == 0:
        return 0.0, 0.0
    sums = np.cumsum(terms)
    if sums.size == 1:
        return float(sums[0]), abs(float(terms[0]))

    def estimate(end: int) -> float:
        return _averaged(sums[max(0, end - window) : end])

    current = estimate(sums.size)
    error = abs(current - estimate(sums.size - 1))
    if sums.size > 2:
        error = max(error, abs(estimate(sums.size - 1) - estimate(sums.size - 2)))
    return current, error


def neville_at_zero(x: Sequence[float] | np.ndarray, y: Sequence[float] | np.ndarray) -> float:
    """Value at x = 0 of the interpolating polynomial through (x, y)."""
    x = np.asarray(x, dtype=float)
    p = np.asarray(y, dtype=float).copy()
    n = x.size
    for k in range(1, n):
        for i in range(n - k):
            p[i] = (x[i + k] * p[i] - x[i] * p[i + 1]) / (x[i + k] - x[i])
    return float(p[0])


def richardson_extrapolate(
    x: Sequence[float] | np.ndarray, y: Sequence[float] | np.ndarray, order: int = 2
) -> tuple[float, float]:
    """Polynomial extrapolation of y(x) to x = 0 from the ``order + 1`` samples nearest zero.

    The error estimate is the change against the extrapolation of one order lower.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size != y.size or x.size < 2:
        raise ValueError("Richardson extrapolation needs at least two matching samples")
    order = min(order, x.size - 1)
    nearest = np.argsort(np.abs(x), kind="stable")
    used = nearest[: order + 1]
    value = neville_at_zero(x[used], y[used])
    lower = neville_at_zero(x[used[:order]], y[used[:order]])
    return value, abs(value - lower)
