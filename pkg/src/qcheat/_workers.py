"""Worker-pool helper for level-parallel grid loops.

QCHEAT_THREADS caps the pool size; absent, the hardware default is used.
Callers pass a closure that fills disjoint slots of preallocated arrays,
so results are deterministic regardless of scheduling.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor


def worker_count() -> int:
    env = os.environ.get("QCHEAT_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            return 1
    return os.cpu_count() or 1


def run_indexed(fn, count: int) -> None:
    """Run fn(j) for j in range(count), in parallel when workers allow."""
    workers = min(worker_count(), count)
    if workers <= 1:
        for j in range(count):
            fn(j)
        return
    with ThreadPoolExecutor(max_workers=workers) as pool:
        # consume to re-raise worker exceptions
        list(pool.map(fn, range(count)))
