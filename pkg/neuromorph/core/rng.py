"""
Seeded pseudo-random generator for synthetic fixtures

SplitMix64 (Steele, Lea & Flood):
    state += 0x9E3779B97F4A7C15
    z = (state ^ (state >> 30)) * 0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB
    out = z ^ (z >> 31)
all arithmetic modulo 2**64. Floats take the top 53 bits; bounded integers
use the multiply-shift map lo + ((out >> 11) * span >> 53).
"""

import numpy as np

GAMMA = 0x9E3779B97F4A7C15
MIX1 = 0xBF58476D1CE4E5B9
MIX2 = 0x94D049BB133111EB
MASK64 = (1 << 64) - 1


def _mix(z: int) -> int:
    z = ((z ^ (z >> 30)) * MIX1) & MASK64
    z = ((z ^ (z >> 27)) * MIX2) & MASK64
    return z ^ (z >> 31)


class SplitMix64:
    """SplitMix64 generator with scalar and vectorised draws"""

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + GAMMA) & MASK64
        return _mix(self.state)

    def uniform(self) -> float:
        """Float in [0, 1)"""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def uniform_range(self, lo: float, hi: float) -> float:
        return lo + (hi - lo) * self.uniform()

    def randint(self, lo: int, hi: int) -> int:
        """Integer in [lo, hi], both ends inclusive"""
        span = hi - lo + 1
        return lo + (((self.next_u64() >> 11) * span) >> 53)

    def next_u64_array(self, n: int) -> np.ndarray:
        """Next n outputs, identical to n calls of next_u64()"""
        steps = np.arange(1, n + 1, dtype=np.uint64)
        z = np.uint64(self.state) + steps * np.uint64(GAMMA)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(MIX1)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(MIX2)
        z = z ^ (z >> np.uint64(31))
        self.state = (self.state + n * GAMMA) & MASK64
        return z

    def randint_array(self, n: int, lo: int, hi: int) -> np.ndarray:
        span = np.uint64(hi - lo + 1)
        top = self.next_u64_array(n) >> np.uint64(11)
        return (top * span >> np.uint64(53)).astype(np.int64) + lo
