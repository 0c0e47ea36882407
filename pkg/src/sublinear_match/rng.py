"""SplitMix64 streams and seed splitting.

Every random choice made by the oracles and estimators flows through this
generator. The compiled kernels reimplement the same recurrence, so a seed
yields bit-identical behaviour on either engine.
"""

from __future__ import annotations

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB
_INV53 = 1.0 / (1 << 53)


def mix64(z: int) -> int:
    z = ((z ^ (z >> 30)) * _M1) & MASK64
    z = ((z ^ (z >> 27)) * _M2) & MASK64
    return z ^ (z >> 31)


def derive_seed(master: int, index: int) -> int:
    """Order-independent child seed for sub-stream ``index`` of ``master``."""
    return mix64((mix64((master + GOLDEN) & MASK64) + index) & MASK64)


class SplitMix64:
    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + GOLDEN) & MASK64
        return mix64(self.state)

    def random(self) -> float:
        """Uniform double in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * _INV53

    def bounded(self, n: int) -> int:
        """Uniform integer in [0, n) by rejection; exact for any 1 <= n < 2**64."""
        threshold = (1 << 64) % n
        while True:
            x = self.next_u64()
            if x >= threshold:
                return x % n
