# -*- coding: utf-8 -*-

"""
Seeded generator behind every shuffle and sample in the package.

64-bit linear congruential generator (MMIX constants):
    state(n+1) = (6364136223846793005 * state(n) + 1442695040888963407) mod 2**64
The seed is the initial state (taken mod 2**64). Each output is the state after stepping.
below(n) maps an output to [0, n) with the multiply-high reduction (x * n) >> 64.
shuffle() is Fisher-Yates from the last position down to 1.

The sequence depends on nothing but the seed, so results are identical on every platform
and library version.
"""

from typing import MutableSequence, TypeVar

T = TypeVar("T")

MULTIPLIER = 6364136223846793005
INCREMENT = 1442695040888963407
MASK = (1 << 64) - 1


class Lcg64:
    __slots__ = "_state", "seed"

    def __init__(self, seed: int):
        self.seed = seed
        self._state = seed & MASK

    def next_u64(self) -> int:
        self._state = (MULTIPLIER * self._state + INCREMENT) & MASK
        return self._state

    def below(self, n: int) -> int:
        if n <= 0:
            raise ValueError("below() requires n > 0")
        return (self.next_u64() * n) >> 64

    def shuffle(self, items: MutableSequence[T]) -> MutableSequence[T]:
        """In place Fisher-Yates. Returns the same sequence."""
        for i in range(len(items) - 1, 0, -1):
            j = self.below(i + 1)
            items[i], items[j] = items[j], items[i]
        return items

    def __repr__(self):
        return f"{self.__class__.__name__}(seed={self.seed})"
