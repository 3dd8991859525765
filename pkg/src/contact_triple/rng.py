"""SplitMix64: a tiny, fully specified 64-bit generator for reproducible reports."""

from __future__ import annotations

import numpy as np

MASK = (1 << 64) - 1
DEFAULT_SEED = 0xC0FFEE


class SplitMix64:
    def __init__(self, seed: int = DEFAULT_SEED):
        self.state = seed & MASK

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
        return z ^ (z >> 31)

    def random(self) -> float:
        """Uniform double in [0, 1) from the top 53 bits."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def uniform(self, low=0.0, high=1.0, size=None):
        if size is None:
            return low + (high - low) * self.random()
        shape = (size,) if isinstance(size, int) else tuple(size)
        count = int(np.prod(shape))
        u = np.array([self.random() for _ in range(count)]).reshape(shape)
        return low + (high - low) * u

    def sign(self) -> float:
        return 1.0 if self.next_u64() & 1 else -1.0
