"""Deterministic 64-bit random primitives shared by encoder, channels and harness.

Everything that needs randomness (key expansion, message generation, channel
noise, per-trial seeds) is derived from one splitmix-style counter generator:
the state advances by a fixed odd constant and each output is an avalanche
hash of the state.  All integer arithmetic is modulo 2**64 and uniform floats
are exact dyadic rationals, so the draw sequence for a given seed is
identical across runs, platforms and processes.
"""

from __future__ import annotations

import math

MASK64 = (1 << 64) - 1

# splitmix64 constants
GOLDEN_GAMMA = 0x9E3779B97F4A7C15
_MIX_A = 0xBF58476D1CE4E5B9
_MIX_B = 0x94D049BB133111EB


def mix64(x: int) -> int:
    """Avalanche a 64-bit value (the splitmix64 output function)."""
    x &= MASK64
    x = ((x ^ (x >> 30)) * _MIX_A) & MASK64
    x = ((x ^ (x >> 27)) * _MIX_B) & MASK64
    return x ^ (x >> 31)


def stream_seed(master_seed: int, index: int) -> int:
    """Seed for substream `index` of `master_seed` (e.g. one Monte-Carlo trial).

    Equals the (index+1)-th raw output of ``KeyedRandom(master_seed)``, so
    substream seeds are exactly the successive outputs of the master
    generator and use no second mixing primitive.
    """
    if index < 0:
        raise ValueError("substream index must be non-negative")
    return mix64((master_seed + (index + 1) * GOLDEN_GAMMA) & MASK64)


class KeyedRandom:
    """Sequential splitmix64 generator with uniform, integer and Gaussian draws."""

    __slots__ = ("_state", "_spare_gauss")

    def __init__(self, seed: int):
        self._state = seed & MASK64
        self._spare_gauss: float | None = None

    def next_u64(self) -> int:
        self._state = (self._state + GOLDEN_GAMMA) & MASK64
        return mix64(self._state)

    def next_float(self) -> float:
        """Uniform draw in [0, 1) with 53-bit resolution."""
        return (self.next_u64() >> 11) * 2.0**-53

    def next_below(self, n: int) -> int:
        """Uniform integer in [0, n); modulo bias is below n/2**64, negligible here."""
        if n <= 0:
            raise ValueError("n must be positive")
        return self.next_u64() % n

    def next_bits(self, length_bits: int) -> int:
        """`length_bits` random bits as an int; first draw supplies the high bits."""
        if length_bits <= 0:
            raise ValueError("length_bits must be positive")
        words = (length_bits + 63) // 64
        value = 0
        for _ in range(words):
            value = (value << 64) | self.next_u64()
        return value >> (64 * words - length_bits)

    def next_gauss(self) -> float:
        """Standard normal via Box-Muller; both outputs of a pair are used, in order."""
        if self._spare_gauss is not None:
            z = self._spare_gauss
            self._spare_gauss = None
            return z
        u1 = 1.0 - self.next_float()  # (0, 1]: keeps the log finite
        u2 = self.next_float()
        r = math.sqrt(-2.0 * math.log(u1))
        self._spare_gauss = r * math.sin(2.0 * math.pi * u2)
        return r * math.cos(2.0 * math.pi * u2)
