"""Project-wide seeded random number generation.

All randomness flows through counter-based Philox generators keyed by
(seed, stream). Streams keep independent consumers (data split, GA loop)
from perturbing each other, so one seed reproduces an entire run.
"""

import numpy as np

STREAM_SPLIT = 1
STREAM_TREE = 2
STREAM_GA = 3


def make_rng(seed: int, stream: int) -> np.random.Generator:
    """Return a Philox-backed generator for the given seed and stream id."""
    if not 0 <= seed < 2**64:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    key = (int(stream) << 64) | int(seed)
    return np.random.Generator(np.random.Philox(key=key))
