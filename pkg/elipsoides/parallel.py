# elipsoides/parallel.py
"""Gerador aleatório com nome e o map paralelo usados pelos estudos e pelo dro."""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, TypeVar

import numpy as np

T = TypeVar("T")
R = TypeVar("R")

RNG_NAME = "numpy.Philox-4x64"

STREAM_INSTANCE = 0
STREAM_SEEDS = 1
STREAM_CORRELATION = 2


def make_rng(seed: int, stream: int = 0) -> np.random.Generator:
    """Philox com chave = seed e contador inicial separado por stream."""
    counter = np.zeros(4, dtype=np.uint64)
    counter[-1] = np.uint64(stream)
    return np.random.Generator(np.random.Philox(key=int(seed), counter=counter))


def rng_label() -> str:
    return f"{RNG_NAME} numpy {np.__version__}"


def parallel_map(fn: Callable[[T], R], items: Iterable[T], workers: int = 1) -> list[R]:
    """Resultados na ordem da entrada; workers <= 1 roda em sequência."""
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
