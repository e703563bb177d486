#!/usr/bin/env python3
"""
Fork-join runtime
A small thread pool with binary forks, ordered parallel maps and min-reductions.
Forks nest inside workers up to `fork_depth` levels; below that they run
sequentially. A join cancels a forked task that no worker has picked up yet
and runs it inline, so a thread only ever waits on tasks that are already
running and nested parallelism cannot deadlock.
"""

import logging
import math
import os
import threading
from concurrent.futures import Future, ThreadPoolExecutor
from contextlib import contextmanager
from typing import Callable, Iterable, List, Optional, Sequence, Tuple, TypeVar

from dp_types import InvalidInputError

logger = logging.getLogger(__name__)

T = TypeVar('T')
U = TypeVar('U')

_local = threading.local()


def _depth() -> int:
    return getattr(_local, 'depth', 0)


def _run_at(depth: int, fn: Callable[[], T]) -> T:
    previous = _depth()
    _local.depth = depth
    try:
        return fn()
    finally:
        _local.depth = previous


class ForkJoinPool:
    """Fork-join helpers on top of a ThreadPoolExecutor"""

    def __init__(self, threads: int = 1):
        if threads < 1:
            raise InvalidInputError(f"thread count must be positive, got {threads}")
        self.threads = threads
        # one subtree per worker, plus two levels of slack
        self.fork_depth = math.ceil(math.log2(threads)) + 2 if threads > 1 else 0
        self._executor: Optional[ThreadPoolExecutor] = None
        if threads > 1:
            self._executor = ThreadPoolExecutor(max_workers=threads, thread_name_prefix='forkjoin')

    @property
    def sequential(self) -> bool:
        return self._executor is None or _depth() >= self.fork_depth

    def _join(self, future: Future, depth: int, fn: Callable[[], T]) -> T:
        if future.cancel():
            return _run_at(depth, fn)
        return future.result()

    def par_do(self, left: Callable[[], T], right: Callable[[], U]) -> Tuple[T, U]:
        """Run two thunks, possibly in parallel, and return both results"""
        if self.sequential:
            return left(), right()
        depth = _depth() + 1
        future = self._executor.submit(_run_at, depth, left)
        right_result = _run_at(depth, right)
        return self._join(future, depth, left), right_result

    def parallel_map(self, fn: Callable[[T], U], items: Sequence[T], grain: int = 256) -> List[U]:
        """Ordered map; items are split into contiguous chunks of at least `grain`"""
        count = len(items)
        grain = max(1, grain)
        if self.sequential or count <= grain:
            return [fn(item) for item in items]

        chunks = min(self.threads * 4, (count + grain - 1) // grain)
        bounds = [count * c // chunks for c in range(chunks + 1)]

        def run_chunk(lo: int, hi: int) -> List[U]:
            return [fn(items[idx]) for idx in range(lo, hi)]

        # chunks already cover every worker, so nothing forks inside them
        tasks = [lambda lo=lo, hi=hi: run_chunk(lo, hi) for lo, hi in zip(bounds[:-1], bounds[1:])]
        futures = [self._executor.submit(_run_at, self.fork_depth, task) for task in tasks]
        results: List[U] = []
        for future, task in zip(futures, tasks):
            results.extend(self._join(future, self.fork_depth, task))
        return results

    def min_reduce(self, values: Iterable[Tuple]) -> Optional[Tuple]:
        """Associative min over tuples; lexicographic order breaks ties deterministically"""
        best = None
        for value in values:
            if best is None or value < best:
                best = value
        return best

    def shutdown(self):
        if self._executor is not None:
            self._executor.shutdown(wait=True)
            self._executor = None


_pool = ForkJoinPool(1)


def get_pool() -> ForkJoinPool:
    return _pool


def get_threads() -> int:
    return _pool.threads


def max_threads() -> int:
    return os.cpu_count() or 1


def set_threads(threads: int) -> ForkJoinPool:
    """Replace the global pool with one of the given size"""
    global _pool
    if threads != _pool.threads:
        old = _pool
        _pool = ForkJoinPool(threads)
        old.shutdown()
        logger.debug("fork-join pool resized to %d threads", threads)
    return _pool


@contextmanager
def threads(count: int):
    """Temporarily run with a pool of `count` threads"""
    previous = get_threads()
    set_threads(count)
    try:
        yield get_pool()
    finally:
        set_threads(previous)
