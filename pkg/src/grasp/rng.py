"""Seed derivation and random generator construction.

All randomness flows through numpy's PCG64 so that streams are reproducible
across platforms and replicable outside Python. Sub-seeds are derived with
SplitMix64, chained over integer parts:

    h = 0
    for part in parts:
        h = splitmix64(h ^ part)

Both algorithms are published and small enough to port anywhere.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1


def splitmix64(x: int) -> int:
    """One SplitMix64 output step for a 64-bit input."""
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (x ^ (x >> 31)) & _MASK64


def derive_seed(*parts: int) -> int:
    """Mix integer parts into one 64-bit seed, order-sensitive."""
    h = 0
    for part in parts:
        h = splitmix64((h ^ part) & _MASK64)
    return h


def generator(seed: int) -> np.random.Generator:
    """A fresh PCG64 generator for the given 64-bit seed."""
    return np.random.Generator(np.random.PCG64(seed))
