"""Reproducible random streams.

Lcg64 is the 64-bit linear congruential generator with Knuth's MMIX
constants (a = 6364136223846793005, c = 1442695040888963407, mod 2^64);
uniform doubles take the top 53 bits. The recurrence is spelled out here
so any implementation can reproduce a stream from its seed. split_seed
derives independent per-stream seeds from a root seed with the
SplitMix64 finalizer.
"""

MASK64 = (1 << 64) - 1
_A = 6364136223846793005
_C = 1442695040888963407


class Lcg64:
    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state * _A + _C) & MASK64
        return self.state

    def uniform(self, lo: float = 0.0, hi: float = 1.0) -> float:
        """Uniform double in [lo, hi) from the top 53 bits."""
        u = self.next_u64() >> 11
        return lo + (hi - lo) * (u / 9007199254740992.0)  # 2^53


def split_seed(root: int, *labels: int) -> int:
    """Derive a child seed from a root and integer labels (SplitMix64)."""
    z = root & MASK64
    for label in labels:
        z = (z + 0x9E3779B97F4A7C15 * (label + 1)) & MASK64
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        z = z ^ (z >> 31)
    return z
