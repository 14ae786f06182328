"""Seeded random streams.

All randomness comes from numpy's PCG64 bit generator seeded through
``SeedSequence``.  Child seeds are plain integers so a single trial can be
replayed from the number stored in its stats record.
"""
import numpy as np

ALGORITHM = "numpy.PCG64/SeedSequence"


def make_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.PCG64(seed))


def split_seeds(seed: int, count: int) -> list[int]:
    """Deterministically derive ``count`` independent 64-bit seeds from ``seed``."""
    children = np.random.SeedSequence(seed).spawn(count)
    return [int(c.generate_state(1, dtype=np.uint64)[0]) for c in children]
