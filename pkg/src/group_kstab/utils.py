"""Shared utility functions."""

from __future__ import annotations

import hashlib
import json

from collections.abc import Callable, Iterable, Iterator
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from contextvars import ContextVar
from typing import Any, TypeVar

T = TypeVar("T")
R = TypeVar("R")

_worker_threads: ContextVar[int] = ContextVar("group_kstab_threads", default=1)


@contextmanager
def worker_threads(threads: int) -> Iterator[None]:
    """Set the default thread count for ``ordered_map`` inside the block."""
    token = _worker_threads.set(max(1, threads))
    try:
        yield
    finally:
        _worker_threads.reset(token)


def ordered_map(
    func: Callable[[T], R], items: Iterable[T], threads: int | None = None
) -> list[R]:
    """Map ``func`` over ``items``, keeping input order regardless of threads.

    ``threads`` defaults to the value set by ``worker_threads``.
    """
    items = list(items)
    if threads is None:
        threads = _worker_threads.get()
    if threads <= 1 or len(items) < 2:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=min(threads, len(items))) as pool:
        return list(pool.map(func, items))


def canonical_json(data: Any) -> str:
    """Deterministic JSON text: sorted keys, fixed separators, trailing newline."""
    return json.dumps(data, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def content_hash(data: Any) -> str:
    """sha256 of the canonical JSON form of ``data``."""
    text = json.dumps(data, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode("utf-8")).hexdigest()
