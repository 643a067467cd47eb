"""Seedable 64-bit random number generation for reproducible simulation.

The generator is xoshiro256** (version 1.0), seeded through the splitmix64
sequence; both are implemented here in pure Python and again in the compiled
kernel with identical integer semantics, so traces are bit-for-bit equal
across the two. Bounded draws use rejection from the top partial block
(accept x >= 2^64 mod bound, return x mod bound), which is exact and
consumes the same number of raw outputs on every implementation.

Stream splitting: replica k of a run with root seed s uses the derived seed
mix64(s + (k + 1) * GOLDEN). The generator name is recorded in every trace.
"""

from __future__ import annotations

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15

RNG_NAME = "xoshiro256**-1.0/splitmix64"


def mix64(x: int) -> int:
    """splitmix64 output stage."""
    x &= MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return x ^ (x >> 31)


def seed_state(seed: int) -> tuple[int, int, int, int]:
    """Derive the four xoshiro256** state words from a 64-bit seed."""
    sm = seed & MASK64
    words = []
    for _ in range(4):
        sm = (sm + GOLDEN) & MASK64
        words.append(mix64(sm))
    if not any(words):
        words[0] = GOLDEN
    return tuple(words)


def child_seed(seed: int, index: int) -> int:
    """Derived seed for replica index under root seed."""
    return mix64((seed + (index + 1) * GOLDEN) & MASK64)


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & MASK64


class Xoshiro256StarStar:
    """Pure-Python xoshiro256**; the reference for kernel parity tests."""

    name = RNG_NAME

    def __init__(self, seed: int):
        self.state = list(seed_state(seed))

    def next_u64(self) -> int:
        s = self.state
        result = (_rotl((s[1] * 5) & MASK64, 7) * 9) & MASK64
        t = (s[1] << 17) & MASK64
        s[2] ^= s[0]
        s[3] ^= s[1]
        s[1] ^= s[2]
        s[0] ^= s[3]
        s[2] ^= t
        s[3] = _rotl(s[3], 45)
        return result

    def randbelow(self, bound: int) -> int:
        """Uniform integer in [0, bound) by top-block rejection."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        threshold = ((1 << 64) - bound) % bound
        while True:
            x = self.next_u64()
            if x >= threshold:
                return x % bound
