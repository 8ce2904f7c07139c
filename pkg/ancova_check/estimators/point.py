"""
Point estimators of the average treatment effect: the difference in arm means
and the ANCOVA coefficient on A
"""

import logging
from typing import Optional

import numpy as np
import scipy.linalg as scl

from ancova_check.config import settings
from ancova_check.data.design import design_matrix
from ancova_check.exceptions import DegenerateDesignError, IllConditionedError, RankDeficientError
from ancova_check.models.results import AncovaFit
from ancova_check.models.trial import TrialDataset

logger = logging.getLogger(__name__)


def unadjusted_estimate(data: TrialDataset) -> float:
    """Difference in treatment group sample means"""
    n1, n0 = data.arm_sizes()
    if n1 == 0 or n0 == 0:
        raise DegenerateDesignError("unadjusted estimate needs both arms to be non-empty")
    arms = data.arms
    return float(np.dot(data.outcomes, arms) / arms.sum() - np.dot(data.outcomes, 1.0 - arms) / (1.0 - arms).sum())


def ancova_fit(
    data: TrialDataset,
    condition_limit: Optional[float] = None,
    rank_tolerance: Optional[float] = None,
) -> AncovaFit:
    """
    OLS fit of Y on [1, A, W] through a column-pivoted QR decomposition.

    Raises RankDeficientError naming the first dependent column, and
    IllConditionedError when cond(X) exceeds the configured limit.
    """
    condition_limit = settings.CONDITION_LIMIT if condition_limit is None else condition_limit
    rank_tolerance = settings.RANK_TOLERANCE if rank_tolerance is None else rank_tolerance
    data.require_fit_size()

    design = design_matrix(data)
    X = design.values
    q, r, perm = scl.qr(X, mode='economic', pivoting=True)

    diag = np.abs(np.diag(r))
    rank = int(np.sum(diag > rank_tolerance * diag[0]))
    if rank < X.shape[1]:
        raise RankDeficientError(design.column_labels[perm[rank]])

    condition_number = float(np.linalg.cond(r))
    if condition_number > condition_limit:
        raise IllConditionedError(condition_number, condition_limit)

    coef = np.empty(X.shape[1])
    coef[perm] = scl.solve_triangular(r, q.T @ data.outcomes)
    residuals = data.outcomes - X @ coef
    residuals.flags.writeable = False

    r_inv = scl.solve_triangular(r, np.eye(X.shape[1]))
    arm_position = int(np.flatnonzero(perm == 1)[0])
    xtx_inv_aa = float(np.sum(r_inv[arm_position, :] ** 2))

    betaW = coef[2:].copy()
    betaW.flags.writeable = False
    return AncovaFit(
        beta0=float(coef[0]),
        betaA=float(coef[1]),
        betaW=betaW,
        residuals=residuals,
        n=data.n,
        k=data.k,
        pi_hat=data.pi_hat,
        rss=float(residuals @ residuals),
        condition_number=condition_number,
        xtx_inv_aa=xtx_inv_aa,
        column_labels=design.column_labels,
    )
