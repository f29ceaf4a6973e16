"""Seeded pseudo-random generator for reproducible initial data.

A 64-bit linear-congruential generator with fixed multiplier/increment so
that identical seeds reproduce bit-identical draws on any platform:

    state <- state * 6364136223846793005 + 1442695040888963407  (mod 2^64)

Each draw maps the high 53 bits of the updated state to [0, 1).
"""

from __future__ import annotations

_MULT = 6364136223846793005
_INC = 1442695040888963407
_MASK = (1 << 64) - 1
_SCALE = 2.0 ** -53


class Lcg64:
    """Deterministic uniform generator over [0, 1)."""

    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = seed & _MASK

    def next_float(self) -> float:
        self.state = (self.state * _MULT + _INC) & _MASK
        return (self.state >> 11) * _SCALE

    def uniform(self, lo: float, hi: float) -> float:
        return lo + (hi - lo) * self.next_float()
