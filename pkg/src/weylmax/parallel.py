"""Thread-pool map with a deterministic-reduction contract.

The heavy kernels here are numpy FFTs and vector ops, which release the
GIL, so threads give real parallelism without pickling overhead.  The
contract every caller relies on: pmap(fn, items) returns one result per
item, in item order, no matter how the pool schedules the work.  Callers
that reduce over chunked work split the items into a fixed chunk count
themselves (independent of the worker count) and merge with exact or
fixed-order operations, so output bytes never depend on threading.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Sequence, TypeVar

__all__ = ["WorkerPool"]

_T = TypeVar("_T")
_R = TypeVar("_R")


class WorkerPool:
    """Owns the worker threads; hands out an order-preserving map.

    threads == 1 bypasses the executor entirely: a plain loop, same
    results, no thread machinery in the way of profiling or debugging.
    """

    def __init__(self, threads: int = 1) -> None:
        if not (isinstance(threads, int) and threads >= 1):
            raise ValueError(f"threads must be an integer >= 1, got {threads!r}")
        self.threads = threads
        self._executor: ThreadPoolExecutor | None = (
            ThreadPoolExecutor(max_workers=threads) if threads > 1 else None
        )

    def pmap(self, fn: Callable[[_T], _R], items: Iterable[_T]) -> list[_R]:
        seq: Sequence[_T] = list(items)
        if self._executor is None or len(seq) <= 1:
            return [fn(item) for item in seq]
        return list(self._executor.map(fn, seq))

    def close(self) -> None:
        if self._executor is not None:
            self._executor.shutdown(wait=True)
            self._executor = None

    def __enter__(self) -> "WorkerPool":
        return self

    def __exit__(self, *exc) -> None:
        self.close()
