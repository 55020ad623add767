"""Reproducible per-replicate random streams.

Each replicate draws from its own Philox counter-based generator whose key is
derived from ``(seed, *keys)`` through ``numpy.random.SeedSequence``.  A
replicate's numbers therefore depend only on its key tuple, never on the
order in which replicates are executed.

Standard normals use a pinned Box-Muller transform on the raw 64-bit output
rather than numpy's ziggurat, so the mapping from raw words to normals is
documented here and stable across numpy releases::

    u = (raw >> 11) * 2**-53                    # uniform on [0, 1)
    r = sqrt(-2 * log1p(-u1)); phi = 2 * pi * u2
    z = (r * cos(phi), r * sin(phi))            # both outputs are used
"""

from __future__ import annotations

from collections.abc import Callable, Iterable
from typing import TypeVar

import numpy as np

T = TypeVar("T")

_U64_MASK = (1 << 64) - 1
_TWO_M53 = 2.0**-53


def _entropy(seed: int) -> int:
    seed = int(seed)
    if seed < 0:
        raise ValueError(f"seed must be a non-negative 64-bit integer, got {seed}")
    return seed & _U64_MASK


def stream(seed: int, *keys: int) -> np.random.Philox:
    """Philox bit generator for the stream labelled ``(seed, *keys)``."""
    ss = np.random.SeedSequence(entropy=_entropy(seed), spawn_key=tuple(int(k) for k in keys))
    return np.random.Philox(key=ss.generate_state(2, dtype=np.uint64))


def uniforms(bitgen: np.random.BitGenerator, size: int) -> np.ndarray:
    raw = bitgen.random_raw(size)
    return (raw >> np.uint64(11)).astype(np.float64) * _TWO_M53


def standard_normal(bitgen: np.random.BitGenerator, shape) -> np.ndarray:
    """Standard normals of the given shape via the pinned Box-Muller transform."""
    shape = (shape,) if np.isscalar(shape) else tuple(shape)
    count = int(np.prod(shape, dtype=np.int64))
    pairs = (count + 1) // 2
    u = uniforms(bitgen, 2 * pairs)
    radius = np.sqrt(-2.0 * np.log1p(-u[0::2]))
    phi = 2.0 * np.pi * u[1::2]
    z = np.empty(2 * pairs)
    z[0::2] = radius * np.cos(phi)
    z[1::2] = radius * np.sin(phi)
    return z[:count].reshape(shape)


def replicate(fn: Callable[[int], T], indices: Iterable[int]) -> list[T]:
    """Evaluate ``fn(k)`` for each replicate index, collected in index order."""
    return [fn(k) for k in sorted(indices)]
