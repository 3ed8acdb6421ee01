"""Small shared helpers: seed derivation, worker pools, atomic file writes."""

from __future__ import annotations

import hashlib
import os
import tempfile
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Sequence, TypeVar

import numpy as np

T = TypeVar("T")
R = TypeVar("R")


def derive_seed(master: int, index: int) -> int:
    """Deterministic child seed for an independent job (class fit, eval run)."""
    return int(np.random.SeedSequence((master, index)).generate_state(1, np.uint64)[0])


def worker_count() -> int:
    """Worker cap from the ESL_THREADS environment variable.

    Unset or invalid means sequential; 0 means one worker per CPU.
    """
    raw = os.environ.get("ESL_THREADS", "")
    try:
        value = int(raw)
    except ValueError:
        return 1
    if value == 0:
        return os.cpu_count() or 1
    return max(1, value)


def parallel_map(fn: Callable[[T], R], items: Sequence[T]) -> list[R]:
    """Map over independent jobs, joined in submission order."""
    workers = min(worker_count(), len(items)) if items else 1
    if workers <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def atomic_write_text(path: str, text: str) -> None:
    """Write a file via a temp file plus rename, so readers never see a
    partial write."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def sha256_file(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()
