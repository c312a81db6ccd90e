"""Process-pool helpers shared by the census and null-model code."""

from __future__ import annotations

import multiprocessing
import os
from concurrent.futures import ProcessPoolExecutor
from typing import Callable


def resolve_workers(workers: int | None) -> int:
    """``None`` means ``$MOTIFSCOPE_THREADS`` or the CPU count."""
    if workers is None:
        env = os.environ.get("MOTIFSCOPE_THREADS")
        workers = int(env) if env else (os.cpu_count() or 1)
    return max(1, workers)


def process_pool(workers: int, initializer: Callable, initargs: tuple) -> ProcessPoolExecutor:
    # fork hands large graphs to workers without pickling them
    methods = multiprocessing.get_all_start_methods()
    ctx = multiprocessing.get_context("fork" if "fork" in methods else None)
    return ProcessPoolExecutor(workers, mp_context=ctx, initializer=initializer, initargs=initargs)
