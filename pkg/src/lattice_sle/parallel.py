"""Worker pool over independent samples, merged in index order."""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

THREADS_ENV = "LATTICE_SLE_THREADS"


def thread_count(threads: int | None = None) -> int:
    """Explicit value, else LATTICE_SLE_THREADS, else 1."""
    if threads is None:
        threads = int(os.environ.get(THREADS_ENV, "1") or 1)
    return max(1, int(threads))


def map_indexed(fn, n: int, threads: int | None = None) -> list:
    """[fn(0), ..., fn(n - 1)]; each call must draw only from its own stream."""
    k = thread_count(threads)
    if k == 1 or n < 2:
        return [fn(i) for i in range(n)]
    with ThreadPoolExecutor(max_workers=k) as pool:
        return list(pool.map(fn, range(n)))
