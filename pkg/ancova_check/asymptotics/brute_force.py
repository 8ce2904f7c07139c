"""
Brute-force oracle for the population limits.

One very large simulated sample is drawn in chunks, each chunk on its own
counter-based substream keyed by (seed, chunk index). Pass one folds the
per-chunk R factors of [X | y] into a single QR factor (in chunk order) and
solves for beta_under; pass two regenerates the same chunks and accumulates
arm-wise residual moments, the squared influence values and the HC0 meat.
The answer does not depend on how many workers process the chunks.
"""

import logging
import math
from collections import OrderedDict
from typing import Dict, List, Optional, Tuple

import numpy as np
import scipy.linalg as scl
from joblib import Parallel, delayed
from tqdm import tqdm

from ancova_check.config import settings
from ancova_check.exceptions import InputError
from ancova_check.models.dgp import DgpSpec
from ancova_check.models.limits import AsymptoticLimits
from ancova_check.sampling import draw_arrays

from .population import assemble_limits

logger = logging.getLogger(__name__)

_CacheKey = Tuple[str, int, int, bool, float, int]
_CACHE: "OrderedDict[_CacheKey, AsymptoticLimits]" = OrderedDict()


def _remember(key: _CacheKey, limits: AsymptoticLimits) -> None:
    _CACHE[key] = limits
    while len(_CACHE) > max(settings.BRUTE_FORCE_CACHE_SIZE, 0):
        _CACHE.popitem(last=False)


def _chunk_sizes(draws: int, chunk: int) -> List[int]:
    full, rest = divmod(draws, chunk)
    return [chunk] * full + ([rest] if rest else [])


def _design(covariates: np.ndarray, arms: np.ndarray, adjust: bool) -> np.ndarray:
    columns = [np.ones(arms.shape[0]), arms]
    if adjust:
        columns.extend(covariates.T)
    return np.column_stack(columns)


def _chunk_r(dgp: DgpSpec, size: int, seed: int, index: int, adjust: bool) -> np.ndarray:
    covariates, arms, outcomes = draw_arrays(dgp, size, seed, (index,))
    augmented = np.column_stack((_design(covariates, arms, adjust), outcomes))
    return scl.qr(augmented, mode='r')[0][: augmented.shape[1]]


def _chunk_moments(dgp: DgpSpec, size: int, seed: int, index: int, adjust: bool, beta: np.ndarray) -> Dict[str, np.ndarray]:
    covariates, arms, outcomes = draw_arrays(dgp, size, seed, (index,))
    X = _design(covariates, arms, adjust)
    residuals = outcomes - X @ beta
    influence = (arms - dgp.pi) / (dgp.pi * (1.0 - dgp.pi)) * residuals
    powers = np.zeros((2, 5))
    for row, a in enumerate((1.0, 0.0)):
        r = residuals[arms == a]
        powers[row] = [r.size, r.sum(), (r ** 2).sum(), (r ** 3).sum(), (r ** 4).sum()]
    weighted = X * residuals[:, None]
    return {
        'powers': powers,
        'influence': np.array([(influence ** 2).sum(), (influence ** 4).sum()]),
        'meat': weighted.T @ weighted,
    }


def _run(tasks, workers: int, show_progress: bool, desc: str) -> list:
    tasks = tqdm(tasks, desc=desc, disable=not show_progress)
    if workers > 1:
        return Parallel(n_jobs=workers, backend='loky')(tasks)
    return [func(*args) for func, args, _ in tasks]


def _arm_variance(powers: np.ndarray) -> Tuple[float, float, float]:
    """Variance, its fourth-moment standard error, and the arm count"""
    count, s1, s2, s3, s4 = powers
    if count < 2:
        raise InputError("brute force drew fewer than two observations in an arm; increase draws")
    mean = s1 / count
    m2 = s2 / count - mean ** 2
    m4 = s4 / count - 4 * mean * s3 / count + 6 * mean ** 2 * s2 / count - 3 * mean ** 4
    se = math.sqrt(max(m4 - m2 ** 2, 0.0) / count)
    return max(m2, 0.0), se, count


def brute_force_limits(
    dgp: DgpSpec,
    draws: Optional[int] = None,
    seed: Optional[int] = None,
    level: Optional[float] = None,
    adjust: bool = True,
    workers: int = 1,
    chunk: Optional[int] = None,
    show_progress: bool = False,
) -> AsymptoticLimits:
    """
    Estimate beta_under, v1, v0 and both limits from `draws` simulated
    participants, with Monte Carlo standard errors for each quantity.

    adjust=False regresses on [1, A] only, giving the unadjusted estimator's limits.
    """
    draws = settings.BRUTE_FORCE_DRAWS if draws is None else int(draws)
    seed = settings.DEFAULT_SEED if seed is None else int(seed)
    level = settings.DEFAULT_LEVEL if level is None else level
    chunk = settings.BRUTE_FORCE_CHUNK if chunk is None else int(chunk)
    if draws < settings.MIN_BRUTE_FORCE_DRAWS:
        raise InputError(f"brute force needs at least {settings.MIN_BRUTE_FORCE_DRAWS} draws; got {draws}")

    key = (dgp.cache_key(), draws, seed, adjust, level, chunk)
    if key in _CACHE:
        _CACHE.move_to_end(key)
        return _CACHE[key]

    sizes = _chunk_sizes(draws, chunk)
    logger.info(f"Brute-force limits: {draws} draws in {len(sizes)} chunks, seed {seed}, {workers} worker(s)")

    factors = _run(
        [delayed(_chunk_r)(dgp, size, seed, index, adjust) for index, size in enumerate(sizes)],
        workers, show_progress, 'brute force: fit',
    )
    folded = factors[0]
    for factor in factors[1:]:
        folded = scl.qr(np.vstack((folded, factor)), mode='r')[0][: folded.shape[1]]
    p = folded.shape[1] - 1
    r_factor, qty = folded[:p, :p], folded[:p, p]
    beta = scl.solve_triangular(r_factor, qty)

    parts = _run(
        [delayed(_chunk_moments)(dgp, size, seed, index, adjust, beta) for index, size in enumerate(sizes)],
        workers, show_progress, 'brute force: moments',
    )
    powers = sum(part['powers'] for part in parts)
    influence = sum(part['influence'] for part in parts)
    meat = sum(part['meat'] for part in parts)

    v1, se1, n1 = _arm_variance(powers[0])
    v0, se0, n0 = _arm_variance(powers[1])
    pi = dgp.pi

    r_inv = scl.solve_triangular(r_factor, np.eye(p))
    bread = r_inv @ r_inv.T
    beta_se = np.sqrt(np.diag(bread @ meat @ bread))

    influence_variance = influence[0] / draws
    influence_se = math.sqrt(max(influence[1] / draws - influence_variance ** 2, 0.0) / draws)

    mc_se = {
        'beta0': float(beta_se[0]),
        'betaA': float(beta_se[1]),
        **{f"betaW{j + 1}": float(se) for j, se in enumerate(beta_se[2:])},
        'v1': se1,
        'v0': se0,
        'thm1_value': math.sqrt((se1 / pi) ** 2 + (se0 / (1.0 - pi)) ** 2),
        'thm2_value': math.sqrt((se1 / (1.0 - pi)) ** 2 + (se0 / pi) ** 2),
        'residual_variance': math.sqrt((pi * se1) ** 2 + ((1.0 - pi) * se0) ** 2),
        'influence_variance': influence_se,
    }
    limits = assemble_limits(
        dgp,
        (beta[0], beta[1], tuple(beta[2:])),
        v1,
        v0,
        level,
        'brute_force',
        'ancova' if adjust else 'unadjusted',
        draws=draws,
        seed=seed,
        influence_variance=float(influence_variance),
        mc_se=mc_se,
    )
    logger.info(
        f"Brute-force limits: thm1={limits.thm1_value:.6g} (se {mc_se['thm1_value']:.2g}), "
        f"thm2={limits.thm2_value:.6g} (se {mc_se['thm2_value']:.2g}); arm counts {int(n1)}/{int(n0)}"
    )
    _remember(key, limits)
    return limits
