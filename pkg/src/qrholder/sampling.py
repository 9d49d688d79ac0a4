"""Deterministic chunked Monte Carlo.

A sweep of ``n`` samples is cut into fixed-size chunks; chunk ``i`` draws from
its own stream seeded by ``(seed, i)``. The chunk layout does not depend on the
number of worker threads, so results are identical for any ``HB_THREADS``.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, TypeVar

import numpy as np

DEFAULT_SEED = 0x5EED
CHUNK = 1 << 14

T = TypeVar("T")


def worker_count() -> int:
    env = os.environ.get("HB_THREADS", "").strip()
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1


def chunk_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed) & (2**64 - 1), index]))


def map_chunks(
    fn: Callable[[np.random.Generator, int], T], n_samples: int, seed: int = DEFAULT_SEED
) -> list[T]:
    """Call ``fn(rng, size)`` once per chunk, returning results in chunk order."""
    sizes = [CHUNK] * (n_samples // CHUNK)
    if n_samples % CHUNK:
        sizes.append(n_samples % CHUNK)
    jobs = [(chunk_rng(seed, i), size) for i, size in enumerate(sizes)]
    workers = min(worker_count(), len(jobs))
    if workers <= 1:
        return [fn(rng, size) for rng, size in jobs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda job: fn(*job), jobs))


def unit_disk(rng: np.random.Generator, size: int) -> np.ndarray:
    """Complex points uniform on the closed unit disk."""
    r = np.sqrt(rng.random(size))
    return r * np.exp(2j * np.pi * rng.random(size))
