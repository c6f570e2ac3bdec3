"""Reproducible uniform sampling of the unit disk.

Sample ``i`` always belongs to chunk ``i // chunk_size`` and each chunk draws
from its own Philox stream keyed by ``(seed, chunk index)``.  The sample set is
therefore a pure function of ``(seed, n, chunk_size)``; the number of worker
threads only changes scheduling.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable

import numpy as np

DEFAULT_CHUNK = 2**18


def chunk_generator(seed: int, chunk: int) -> np.random.Generator:
    """Philox generator for one chunk; the key packs the seed and stream index."""
    if seed < 0 or chunk < 0:
        raise ValueError("seed and chunk index must be non-negative")
    key = (int(chunk) << 64) | (int(seed) & 0xFFFFFFFFFFFFFFFF)
    return np.random.Generator(np.random.Philox(key=key))


def disk_points(seed: int, chunk: int, size: int) -> np.ndarray:
    """``size`` uniform points in the unit disk via ``r = sqrt(u)``, ``theta = 2 pi v``."""
    uv = chunk_generator(seed, chunk).random((2, size))
    return np.sqrt(uv[0]) * np.exp(2j * np.pi * uv[1])


def chunk_bounds(n: int, chunk_size: int = DEFAULT_CHUNK) -> list[tuple[int, int]]:
    return [(start, min(start + chunk_size, n)) for start in range(0, n, chunk_size)]


def map_chunks(
    func: Callable[[np.ndarray], np.ndarray],
    n: int,
    seed: int,
    workers: int = 1,
    chunk_size: int = DEFAULT_CHUNK,
) -> np.ndarray:
    """Apply ``func`` to every chunk of ``n`` disk samples and concatenate in order."""
    bounds = chunk_bounds(n, chunk_size)

    def run(item):
        idx, (lo, hi) = item
        return func(disk_points(seed, idx, hi - lo))

    items = list(enumerate(bounds))
    if workers <= 1 or len(items) == 1:
        parts = [run(it) for it in items]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, items))
    return np.concatenate(parts) if parts else np.empty(0)
