"""Deterministic worker-pool helper.

CROFTON_THREADS caps the thread count (default 1: sequential).  Results are
always collected in submission order, so output is bit-identical regardless
of the worker count.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor


def thread_count() -> int:
    raw = os.environ.get("CROFTON_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def chunked_map(fn, items: list) -> list:
    """Map fn over items, preserving order; threads only when configured."""
    workers = thread_count()
    if workers <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
