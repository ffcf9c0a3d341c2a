"""Bounded worker pool for pure per-item work (results keep input order)."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

__all__ = ["resolve_threads", "pmap"]


def resolve_threads(requested=None) -> int:
    """CLI flag wins; CRYSTAL_THREADS overrides the default of 1."""
    if requested:
        return max(1, int(requested))
    env = os.environ.get("CRYSTAL_THREADS", "").strip()
    return max(1, int(env)) if env else 1


def pmap(fn, items, threads: int = 1) -> list:
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(fn, items))
