"""Seeded random streams.

Every random draw in the simulator comes from a generator derived from one
root seed and a stream key. Keys are tuples of small integers, typically
(grid_index, repetition, purpose), and map through numpy's SeedSequence
spawn keys onto the counter-based Philox generator. A stream depends only
on its key, never on how many other streams were used before it, so
repetitions can run in any order or in parallel.
"""

from enum import IntEnum

import numpy as np

SEED_MASK = (1 << 64) - 1


class Stream(IntEnum):
    """Purpose tag appended to stream keys."""

    ROUNDS = 0
    SHUFFLE = 1
    HASH = 2
    CHANNEL = 3
    SAMPLE = 4


def derive_rng(root_seed: int, *stream_key: int) -> np.random.Generator:
    """Create the generator for one stream.

    Args:
        root_seed: Experiment root seed (reduced to 64 bits).
        *stream_key: Non-negative integers identifying the stream.

    Returns:
        Philox-backed numpy Generator.
    """
    seq = np.random.SeedSequence(root_seed & SEED_MASK, spawn_key=tuple(int(k) for k in stream_key))
    return np.random.Generator(np.random.Philox(seq))
