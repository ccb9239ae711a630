"""SplitMix64 pseudo-random generator.

Instances must be bit-reproducible from a seed in any language, so the
generator is the named SplitMix64 algorithm rather than numpy's default
bit generator. All arithmetic is on unsigned 64-bit integers.
"""

import math

MASK64 = (1 << 64) - 1
_GOLDEN_GAMMA = 0x9E3779B97F4A7C15
_TWO_POW_53 = float(1 << 53)


class SplitMix64:
    """SplitMix64 stream.

    Args:
        seed: Any integer; reduced modulo 2**64.

    Example:
        >>> rng = SplitMix64(0)
        >>> hex(rng.next_u64())
        '0xe220a8397b1dcdaf'
    """

    def __init__(self, seed: int):
        self._state = seed & MASK64

    def next_u64(self) -> int:
        self._state = (self._state + _GOLDEN_GAMMA) & MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def next_double(self) -> float:
        """Uniform double in [0, 1) from the top 53 bits."""
        return (self.next_u64() >> 11) / _TWO_POW_53

    def next_below(self, bound: int) -> int:
        """Integer in [0, bound) by multiply-shift reduction."""
        if bound <= 0:
            raise ValueError(f"bound must be positive, got {bound}")
        return (self.next_u64() * bound) >> 64

    def next_sign(self) -> int:
        """+1 or -1 from the top bit."""
        return 1 if self.next_u64() >> 63 else -1

    def next_gaussian(self) -> float:
        """Standard normal via Box-Muller (cosine branch only, two draws each)."""
        u1 = ((self.next_u64() >> 11) + 1) / _TWO_POW_53  # (0, 1]
        u2 = self.next_double()
        return math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates shuffle."""
        for i in range(len(items) - 1, 0, -1):
            j = self.next_below(i + 1)
            items[i], items[j] = items[j], items[i]
