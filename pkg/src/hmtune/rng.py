"""Portable pseudo-random numbers.

The generator is xorshift64* seeded through splitmix64, so every sequence can
be reproduced from the recurrences below in any language:

    splitmix64:  z = (s += 0x9E3779B97F4A7C15)
                 z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
                 z = (z ^ (z >> 27)) * 0x94D049BB133111EB
                 return z ^ (z >> 31)

    xorshift64*: x ^= x >> 12; x ^= x << 25; x ^= x >> 27
                 return x * 0x2545F4914F6CDD1D

All arithmetic is modulo 2**64. ``below(n)`` maps a 64-bit output ``r`` to
``(r * n) >> 64``.
"""

MASK64 = (1 << 64) - 1


def splitmix64(seed: int) -> int:
    z = (seed + 0x9E3779B97F4A7C15) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


class XorShift64Star:
    def __init__(self, seed: int):
        state = splitmix64(seed & MASK64)
        # all-zero state is a fixed point of xorshift
        self.state = state or 0x9E3779B97F4A7C15

    def next_u64(self) -> int:
        x = self.state
        x ^= x >> 12
        x ^= (x << 25) & MASK64
        x ^= x >> 27
        self.state = x
        return (x * 0x2545F4914F6CDD1D) & MASK64

    def below(self, n: int) -> int:
        """Integer in ``[0, n)``."""
        if n <= 0:
            raise ValueError("n must be positive")
        return (self.next_u64() * n) >> 64

    def integers(self, n: int, count: int) -> list[int]:
        return [self.below(n) for _ in range(count)]

    def shuffle(self, items: list) -> list:
        """Fisher-Yates, walking from the end; returns a new list."""
        out = list(items)
        for i in range(len(out) - 1, 0, -1):
            j = self.below(i + 1)
            out[i], out[j] = out[j], out[i]
        return out
