"""Order-preserving thread-pool map used by cover and lemma verification."""

from __future__ import annotations

import concurrent.futures
import logging
from typing import Any, Callable, Sequence, TypeVar

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")

_default_threads: int | None = None


def set_default_threads(threads: int | None) -> None:
    """Cap worker threads for every later parallel_map call (None = executor default)."""
    global _default_threads
    if threads is not None and threads < 1:
        raise ValueError(f"threads must be >= 1, got {threads}")
    _default_threads = threads


def chunked(items: Sequence[T], chunks: int) -> list[Sequence[T]]:
    """Split items into at most `chunks` contiguous, nonempty slices."""
    if chunks < 1:
        raise ValueError(f"chunks must be >= 1, got {chunks}")
    if not items:
        return []
    size = -(-len(items) // chunks)
    return [items[k : k + size] for k in range(0, len(items), size)]


def parallel_map(
    fn: Callable[[T], R],
    items: Sequence[T],
    threads: int | None = None,
) -> list[R]:
    """Apply fn to every item concurrently; results keep the input order.

    Args:
        fn: Callable applied to each item.
        items: Inputs.
        threads: Worker cap. Falls back to set_default_threads(), then to the
            executor default. ``threads=1`` runs inline.

    Returns:
        ``[fn(x) for x in items]``.
    """
    if not callable(fn):
        raise TypeError(f"fn must be callable, got {type(fn).__name__}")
    if not items:
        return []

    workers = threads if threads is not None else _default_threads
    if workers == 1 or len(items) == 1:
        return [fn(x) for x in items]

    with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(fn, x) for x in items]
        return [f.result() for f in futures]


def reduce_chunks(
    fn: Callable[[Sequence[T]], Any],
    items: Sequence[T],
    threads: int | None = None,
) -> list[Any]:
    """Run fn over contiguous slices of items in parallel.

    The caller merges the per-slice results (min/max/concatenate).
    """
    workers = threads if threads is not None else _default_threads
    slices = chunked(items, max(1, workers or 4))
    logger.debug("reduce_chunks: %d items in %d slices", len(items), len(slices))
    return parallel_map(fn, slices, threads=workers)
