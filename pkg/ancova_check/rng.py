"""
Counter-based random substreams.

Every draw in a simulation comes from a Philox generator keyed by the run seed
and a tuple of integers (replication index, redraw attempt, variable tag, or
brute-force chunk index). The key alone determines the stream, so results do
not depend on how work is split across processes or in which order the pieces
run.
"""

from enum import IntEnum

import numpy as np

__all__ = ["StreamTag", "substream", "validate_seed"]

MAX_SEED = 2 ** 64 - 1


class StreamTag(IntEnum):
    """Variable a substream is reserved for"""
    COVARIATES = 0
    ASSIGNMENT = 1
    OUTCOME = 2


def validate_seed(seed: int) -> int:
    seed = int(seed)
    if not 0 <= seed <= MAX_SEED:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return seed


def substream(seed: int, *key: int) -> np.random.Generator:
    """
    Independent generator for (seed, *key).

    Parameters:

        seed (int): run seed, 0 <= seed < 2**64.
        key (int): non-negative integers identifying the substream.

    Returns:

        numpy.random.Generator backed by Philox.
    """
    sequence = np.random.SeedSequence(entropy=validate_seed(seed), spawn_key=tuple(int(part) for part in key))
    return np.random.Generator(np.random.Philox(sequence))
