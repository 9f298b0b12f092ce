"""Seeded counter-based random streams.

Every source of randomness in a run is an independent Philox stream keyed
by (seed, stream id), so serial and parallel execution produce identical
trajectories and the same seed reproduces identical output on all platforms.
"""

from __future__ import annotations

import numpy as np

# Stream id layout within a run.
STREAM_INIT = 0
STREAM_BATCH = 1
STREAM_CULL = 2
STREAM_PARTICLE_BASE = 16


class RngStream:
    """One independent, seedable, counter-based random stream."""

    def __init__(self, seed: int, stream: int = 0):
        self.seed = int(seed)
        self.stream = int(stream)
        bitgen = np.random.Philox(key=np.array([self.seed & 0xFFFFFFFFFFFFFFFF,
                                                self.stream & 0xFFFFFFFFFFFFFFFF],
                                               dtype=np.uint64))
        self._gen = np.random.Generator(bitgen)

    def standard_normal(self, n: int) -> np.ndarray:
        return self._gen.standard_normal(n)

    def uniform(self, low: float = 0.0, high: float = 1.0, size=None):
        return self._gen.uniform(low, high, size)

    def permutation(self, n: int) -> np.ndarray:
        return self._gen.permutation(n)

    def subset(self, n: int, k: int) -> np.ndarray:
        """k indices out of range(n), uniform without replacement (partial Fisher-Yates)."""
        return self.permutation(n)[:k]


def particle_streams(seed: int, n: int) -> list[RngStream]:
    """One stream per particle, indexed by initial particle position."""
    return [RngStream(seed, STREAM_PARTICLE_BASE + i) for i in range(n)]
