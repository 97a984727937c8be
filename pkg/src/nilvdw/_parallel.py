"""Order-preserving process-pool helpers.

Results are always returned in input order, so outputs do not depend on
the worker count or scheduling.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from itertools import repeat
from typing import Callable, Iterable, Iterator, Sequence, TypeVar

T = TypeVar("T")
R = TypeVar("R")


def _chunks(items: Sequence[T], n: int) -> list[Sequence[T]]:
    size = max(1, -(-len(items) // n))
    return [items[i : i + size] for i in range(0, len(items), size)]


def chunked_map(fn: Callable[..., list[R]], items: Sequence[T], workers: int, *args) -> list[R]:
    """Call ``fn(chunk, *args)`` on contiguous chunks and concatenate the results."""
    if workers <= 1 or len(items) < 2:
        return fn(items, *args)
    chunks = _chunks(items, workers * 4)
    out: list[R] = []
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for part in pool.map(fn, chunks, *(repeat(a) for a in args)):
            out.extend(part)
    return out


def ordered_imap(fn: Callable[[T], R], items: Iterable[T], workers: int) -> Iterator[R]:
    """Lazily yield ``fn(item)`` in input order.

    Breaking out of the loop early cancels work that has not started.
    """
    if workers <= 1:
        for item in items:
            yield fn(item)
        return
    pool = ProcessPoolExecutor(max_workers=workers)
    try:
        pending = []
        it = iter(items)
        for item in it:
            pending.append(pool.submit(fn, item))
            if len(pending) >= workers * 2:
                break
        while pending:
            fut = pending.pop(0)
            for item in it:
                pending.append(pool.submit(fn, item))
                break
            yield fut.result()
    finally:
        pool.shutdown(wait=True, cancel_futures=True)
