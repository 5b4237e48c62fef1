import logging
import os
from collections.abc import Callable, Iterable
from concurrent.futures import ThreadPoolExecutor
from typing import TypeVar

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")

ENV_THREADS = "GLELAB_THREADS"


def resolve_threads(threads: int | None = None) -> int:
    """Thread count for grid work: explicit value, then ``GLELAB_THREADS``, then 1. Zero means all cores."""
    if threads is None:
        raw = os.environ.get(ENV_THREADS, "1")
        try:
            threads = int(raw)
        except ValueError:
            logger.warning("Ignoring non-integer %s=%r", ENV_THREADS, raw)
            threads = 1
    if threads <= 0:
        threads = os.cpu_count() or 1
    return threads


def ordered_map(fn: Callable[[T], R], items: Iterable[T], threads: int | None = None) -> list[R]:
    """``[fn(x) for x in items]`` evaluated on a thread pool; results keep the input order."""
    items = list(items)
    workers = min(resolve_threads(threads), max(len(items), 1))
    if workers <= 1:
        return [fn(item) for item in items]
    logger.debug("Evaluating %d items on %d threads", len(items), workers)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
