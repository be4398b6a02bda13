"""Deterministic random streams for every stochastic operation.

One generator algorithm is used everywhere: SplitMix64 (Steele, Lea &
Flood 2014) run in counter mode.  A stream is identified by the pair
(master seed, operation key); the i-th output of a stream is

    mix64(stream_seed + (i + 1) * GOLDEN)    mod 2**64

where ``stream_seed = mix64(master ^ fnv1a64(key))`` and GOLDEN is the
64-bit golden-ratio constant.  Because outputs are a pure function of
(seed, key, i), results are independent of scheduling and worker count,
and the native and numpy kernel backends reproduce identical draws.

Uniform doubles are ``((z >> 11) + 0.5) * 2**-53`` (open interval (0, 1)).
Bounded integers are ``(z >> 11) % bound``; the modulo bias is below
bound / 2**53 and irrelevant at the corpus sizes involved.  Normals are
obtained from uniforms through the inverse normal CDF.
"""

from __future__ import annotations

import numpy as np
from scipy.special import ndtri

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_INV_2_53 = 1.0 / 9007199254740992.0  # 2**-53


def mix64(z: int) -> int:
    """Scalar SplitMix64 finalizer."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * _MIX1) & MASK64
    z = ((z ^ (z >> 27)) * _MIX2) & MASK64
    return (z ^ (z >> 31)) & MASK64


def mix64_array(z: np.ndarray) -> np.ndarray:
    """Vectorized SplitMix64 finalizer over a uint64 array."""
    z = z.astype(np.uint64, copy=True)
    z ^= z >> np.uint64(30)
    z *= np.uint64(_MIX1)
    z ^= z >> np.uint64(27)
    z *= np.uint64(_MIX2)
    z ^= z >> np.uint64(31)
    return z


def fnv1a64(key: str) -> int:
    h = _FNV_OFFSET
    for byte in key.encode("utf-8"):
        h = ((h ^ byte) * _FNV_PRIME) & MASK64
    return h


def derive_seed(master: int, key: str) -> int:
    """Stream seed for (master seed, stable operation key)."""
    return mix64((master & MASK64) ^ fnv1a64(key))


class Stream:
    """A counter-mode SplitMix64 stream.

    Draws advance an internal counter, so interleaved calls of different
    sizes still produce the canonical output sequence.
    """

    def __init__(self, master: int, key: str = "") -> None:
        self.seed = derive_seed(master, key) if key else master & MASK64
        self.counter = 0

    def _raw(self, n: int) -> np.ndarray:
        start = self.counter + 1
        self.counter += n
        idx = np.arange(start, start + n, dtype=np.uint64)
        base = (np.uint64(self.seed) + idx * np.uint64(GOLDEN)).astype(np.uint64)
        return mix64_array(base)

    def u64(self, n: int) -> np.ndarray:
        return self._raw(n)

    def uniform(self, n: int) -> np.ndarray:
        """Doubles in the open interval (0, 1)."""
        z = self._raw(n)
        return ((z >> np.uint64(11)).astype(np.float64) + 0.5) * _INV_2_53

    def integers(self, n: int, bound: int) -> np.ndarray:
        """Integers in [0, bound)."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        z = self._raw(n) >> np.uint64(11)
        return (z % np.uint64(bound)).astype(np.int64)

    def normal(self, n: int) -> np.ndarray:
        """Standard normals via the inverse CDF."""
        return ndtri(self.uniform(n))

    def subset(self, n: int, k: int) -> np.ndarray:
        """Ascending indices of a uniformly drawn k-subset of range(n).

        The subset is the k smallest (random key, index) pairs, so it is
        invariant to how the remaining indices would be ordered.
        """
        if k >= n:
            return np.arange(n, dtype=np.int64)
        keys = self._raw(n)
        order = np.argsort(keys, kind="stable")
        return np.sort(order[:k]).astype(np.int64)
