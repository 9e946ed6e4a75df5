"""
Worker pool for independent evaluations.

Results always come back in input order, so any reduction over them is
deterministic whatever the pool size.
"""

import logging
from typing import Callable, List, Optional, Sequence, TypeVar

from joblib import Parallel, delayed

import config

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def resolve_workers(workers: Optional[int]) -> int:
    """Explicit worker count, else the configured default."""
    return max(1, int(workers if workers is not None else config.WORKERS))


def pool_map(func: Callable[..., R], items: Sequence[T], workers: Optional[int] = None) -> List[R]:
    """Apply func to each item, in parallel when workers > 1."""
    workers = resolve_workers(workers)
    if workers == 1 or len(items) <= 1:
        return [func(item) for item in items]
    logger.debug(f"Dispatching {len(items)} tasks to {workers} workers")
    return Parallel(n_jobs=workers)(delayed(func)(item) for item in items)


def chunk_ranges(start: int, stop: int, parts: int) -> List[range]:
    """Split [start, stop] into at most `parts` contiguous ranges."""
    total = stop - start + 1
    if total <= 0:
        return []
    parts = max(1, min(parts, total))
    size, extra = divmod(total, parts)
    ranges, lo = [], start
    for i in range(parts):
        hi = lo + size + (1 if i < extra else 0)
        ranges.append(range(lo, hi))
        lo = hi
    return ranges
