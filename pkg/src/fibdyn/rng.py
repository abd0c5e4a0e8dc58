"""Counter-based SplitMix64 streams.

Each draw is ``mix(key + (i + 1) * GAMMA)`` where ``key`` is derived from
``(seed, stream)`` and ``i`` is the global sample counter.  Because a draw
depends only on its counter, any partition of a sample range across workers
reproduces the serial sequence bit for bit.
"""
from __future__ import annotations

import numpy as np

GAMMA = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_MASK = (1 << 64) - 1


def _mix(z: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore"):
        z = (z ^ (z >> np.uint64(30))) * _M1
        z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


def _mix_int(v: int) -> int:
    return int(_mix(np.array([v & _MASK], dtype=np.uint64))[0])


def stream_key(seed: int, stream: int = 0) -> int:
    return _mix_int(_mix_int(seed) ^ ((stream * 0x9E3779B97F4A7C15 + 0x632BE59BD9B4E019) & _MASK))


class SplitMix64:
    """Named, seedable generator with 64-bit state (SplitMix64, Steele et al. 2014)."""

    algorithm = "splitmix64"

    def __init__(self, seed: int, stream: int = 0):
        self.seed = int(seed)
        self.stream = int(stream)
        self.key = np.uint64(stream_key(self.seed, self.stream))

    def raw(self, start: int, count: int) -> np.ndarray:
        i = np.arange(start + 1, start + count + 1, dtype=np.uint64)
        with np.errstate(over="ignore"):
            return _mix(self.key + i * GAMMA)

    def uniform(self, start: int, count: int) -> np.ndarray:
        """Doubles in [0, 1) for counters start .. start+count-1."""
        return (self.raw(start, count) >> np.uint64(11)).astype(np.float64) * (1.0 / 9007199254740992.0)

    def uniform_box(self, lo, hi, start: int, count: int) -> np.ndarray:
        """``count`` points uniform in the box [lo, hi] (one column per dimension).

        Sample k uses counters k*dim .. k*dim + dim - 1.
        """
        lo = np.asarray(lo, dtype=np.float64)
        hi = np.asarray(hi, dtype=np.float64)
        dim = lo.size
        u = self.uniform(start * dim, count * dim).reshape(count, dim)
        return lo + u * (hi - lo)
