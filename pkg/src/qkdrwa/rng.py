"""Portable seeded randomness.

Everything random in the simulator (topologies, request lists, shuffles) is
drawn from SplitMix64, a published 64-bit generator (Steele, Lea & Flood,
2014) that is trivial to reimplement bit-exactly in any language. Child
seeds for the experiment strata are derived with the same finalizer, see
:func:`derive_seed`.
"""

from __future__ import annotations

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15


def mix64(z: int) -> int:
    """SplitMix64 output finalizer (variant 13 of Stafford's mixers)."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


class SplitMix64:
    """SplitMix64 generator with a few convenience draws.

    Integer draws use bitmask rejection so they are exactly uniform; float
    draws take the top 53 bits of one output.
    """

    __slots__ = ("state",)

    def __init__(self, seed: int) -> None:
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + GOLDEN_GAMMA) & MASK64
        return mix64(self.state)

    def random(self) -> float:
        """Uniform float in [0, 1)."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def uniform(self, low: float, high: float) -> float:
        return low + (high - low) * self.random()

    def randbelow(self, n: int) -> int:
        """Uniform integer in [0, n)."""
        if n <= 0:
            raise ValueError("randbelow() requires n > 0")
        if n == 1:
            return 0
        mask = (1 << (n - 1).bit_length()) - 1
        while True:
            # high bits of SplitMix64 are as good as the low ones
            r = self.next_u64() & mask
            if r < n:
                return r

    def randint(self, low: int, high: int) -> int:
        """Uniform integer in [low, high], both ends inclusive."""
        return low + self.randbelow(high - low + 1)

    def choice(self, seq):
        return seq[self.randbelow(len(seq))]

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates shuffle (Durstenfeld, back to front)."""
        for i in range(len(items) - 1, 0, -1):
            j = self.randbelow(i + 1)
            items[i], items[j] = items[j], items[i]


# Purpose tags keep the seed streams of different strata apart.
TAG_TOPOLOGY = 1
TAG_REQUEST_PAIRS = 2
TAG_REQUEST_KINDS = 3


def derive_seed(parent: int, *keys: int) -> int:
    """Derive a child seed from a parent seed and a tuple of integer keys.

    ``h = mix64(parent)``, then for each key ``h = mix64(h ^ mix64(key + GOLDEN_GAMMA))``.
    The result depends on the order of the keys.
    """
    h = mix64(parent & MASK64)
    for key in keys:
        h = mix64(h ^ mix64((key + GOLDEN_GAMMA) & MASK64))
    return h
