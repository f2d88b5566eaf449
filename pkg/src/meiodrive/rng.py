"""Counter-based random streams.

Every replicate draws from its own stream, derived from a master seed and a
replicate index by a fixed mixing function, so results never depend on
scheduling and adding replicates never perturbs existing ones.

The generator is splitmix64 used in counter mode: output ``i`` of a stream
with seed ``s`` is ``mix64(s + i * GAMMA)`` (wrapping 64-bit arithmetic).
The numba kernels in :mod:`meiodrive._kernels` implement the identical
sequence, so Python-side and kernel-side draws from the same stream agree
bit for bit.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15
STREAM_SALT = 0xD2B74407B1CE6E93


def mix64(z: int) -> int:
    """splitmix64 finalizer on a 64-bit integer."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def stream_seed(master_seed: int, index: int) -> int:
    """Seed of stream ``index`` under ``master_seed`` (the published mixing)."""
    return mix64((master_seed ^ ((index + 1) * STREAM_SALT)) & MASK64)


class RandomStream:
    """Resumable uniform stream; ``pos`` counts draws already consumed."""

    def __init__(self, seed: int, pos: int = 0):
        self.seed = seed & MASK64
        self.pos = int(pos)

    def next_u64(self) -> int:
        self.pos += 1
        return mix64((self.seed + self.pos * GAMMA) & MASK64)

    def u01(self) -> float:
        # in [0, 1)
        return (self.next_u64() >> 11) * (1.0 / 9007199254740992.0)

    def exponential(self, rate: float) -> float:
        return -np.log1p(-self.u01()) / rate

    def randint(self, n: int) -> int:
        return int(self.u01() * n)

    def u01_array(self, n: int) -> np.ndarray:
        idx = np.arange(self.pos + 1, self.pos + n + 1, dtype=np.uint64)
        self.pos += n
        z = np.uint64(self.seed) + idx * np.uint64(GAMMA)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
        z = z ^ (z >> np.uint64(31))
        return (z >> np.uint64(11)) * (1.0 / 9007199254740992.0)

    def spawn(self, index: int) -> "RandomStream":
        return RandomStream(stream_seed(self.seed, index))
