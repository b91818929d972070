"""Portable seeded random streams.

All randomness in the package flows through SplitMix64, a 64-bit generator
with a one-line state transition:

    state' = state + 0x9E3779B97F4A7C15  (mod 2^64)
    output = mix64(state')

where ``mix64`` is the finalizer below.  Uniform doubles take the top 53
bits of the output.  Substreams are derived from a root seed and a fixed
purpose tag, so independent parts of a run (graph generation, per-trial
initial vectors, check instances) never share a stream.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15

# Purpose tags for substream derivation.  Fixed forever; changing one
# changes every downstream artifact.
STREAM_GRAPH = 1
STREAM_INITIAL = 2
STREAM_CHECK = 3


def mix64(z: int) -> int:
    """SplitMix64 finalizer (Stafford variant 13)."""
    z &= _MASK64
    z ^= z >> 30
    z = (z * 0xBF58476D1CE4E5B9) & _MASK64
    z ^= z >> 27
    z = (z * 0x94D049BB133111EB) & _MASK64
    z ^= z >> 31
    return z


class SplitMix64:
    """Sequential SplitMix64 stream."""

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + _GOLDEN) & _MASK64
        return mix64(self._state)

    def uniform(self) -> float:
        """Uniform double in [0, 1) with 53 bits of precision."""
        return (self.next_u64() >> 11) * 2.0**-53

    def uniforms(self, k: int) -> np.ndarray:
        return np.array([self.uniform() for _ in range(k)])

    def integer(self, bound: int) -> int:
        """Uniform integer in [0, bound) by rejection on 64-bit words."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        limit = (_MASK64 + 1) - ((_MASK64 + 1) % bound)
        while True:
            u = self.next_u64()
            if u < limit:
                return u % bound


def substream(root_seed: int, purpose: int, index: int = 0) -> SplitMix64:
    """Derive an independent stream from (root seed, purpose tag, index)."""
    seed = mix64(mix64(root_seed) ^ mix64((purpose << 32) ^ index))
    return SplitMix64(seed)
