"""
Draw (W, A, Y) arrays from a DgpSpec on keyed substreams
"""

import math
from typing import Tuple

import numpy as np

from ancova_check.models.dgp import DgpSpec
from ancova_check.rng import StreamTag, substream

ASSIGNMENT_MODES = ('iid-bernoulli', 'fixed-margin')


def assign_arms(rng: np.random.Generator, n: int, pi: float, assignment: str = 'iid-bernoulli') -> np.ndarray:
    """Simple randomisation, or exactly floor(n * pi) treated in random positions"""
    if assignment == 'iid-bernoulli':
        return (rng.random(n) < pi).astype(float)
    if assignment == 'fixed-margin':
        arms = np.zeros(n)
        arms[rng.permutation(n)[:math.floor(n * pi)]] = 1.0
        return arms
    raise ValueError(f"assignment must be one of {ASSIGNMENT_MODES}; got {assignment!r}")


def draw_arrays(
    dgp: DgpSpec,
    n: int,
    seed: int,
    key: Tuple[int, ...],
    assignment: str = 'iid-bernoulli',
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Covariates, arms and outcomes for n participants, fully determined by (seed, key)"""
    covariates = dgp.sample_covariates(substream(seed, *key, StreamTag.COVARIATES), n)
    arms = assign_arms(substream(seed, *key, StreamTag.ASSIGNMENT), n, dgp.pi, assignment)
    outcomes = dgp.sample_outcomes(substream(seed, *key, StreamTag.OUTCOME), covariates, arms)
    return covariates, arms, outcomes
