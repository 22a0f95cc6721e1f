"""Row-chunked grid evaluation on a thread pool.

The rows are cut into fixed-size blocks whatever the worker count, so every
block sees exactly the same numpy calls and the assembled array is
bit-identical for any number of threads.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np


ROW_BLOCK = 16


def default_threads() -> int:
    return max(1, len(os.sched_getaffinity(0)) if hasattr(os, "sched_getaffinity") else (os.cpu_count() or 1))


def fill_grid(kernel, rows, cols, threads: int | None = 1, dtype=complex):
    """Evaluate kernel(rows[:, None], cols[None, :]) as an (len(rows), len(cols)) array."""
    rows = np.asarray(rows, dtype=float)
    cols = np.asarray(cols, dtype=float)
    out = np.empty((rows.size, cols.size), dtype=dtype)
    threads = default_threads() if threads is None else int(threads)
    if threads < 1:
        raise ValueError(f"threads must be >= 1, got {threads}")
    chunks = [np.arange(i, min(i + ROW_BLOCK, rows.size)) for i in range(0, rows.size, ROW_BLOCK)]

    def work(idx):
        out[idx] = kernel(rows[idx][:, None], cols[None, :])

    if threads == 1:
        for idx in chunks:
            work(idx)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(work, chunks))
    return out
