"""
Two-sample variances of the unadjusted difference in means
"""

from typing import Optional

import numpy as np

from ancova_check.exceptions import DegenerateDesignError
from ancova_check.models.results import AncovaFit, VarianceEstimate, VarianceKind
from ancova_check.models.trial import TrialDataset

from .base_estimator import BaseVarianceEstimator


def _arm_moments(data: TrialDataset, minimum: int):
    n1, n0 = data.arm_sizes()
    if min(n1, n0) < minimum:
        raise DegenerateDesignError(f"each arm needs at least {minimum} observations; got n1={n1}, n0={n0}")
    s1 = float(np.var(data.arm(1), ddof=1)) if n1 > 1 else 0.0
    s0 = float(np.var(data.arm(0), ddof=1)) if n0 > 1 else 0.0
    return n1, n0, s1, s0


def welch_satterthwaite_dof(data: TrialDataset) -> float:
    n1, n0, s1, s0 = _arm_moments(data, 2)
    u1, u0 = s1 / n1, s0 / n0
    denominator = u1 ** 2 / (n1 - 1) + u0 ** 2 / (n0 - 1)
    if denominator == 0:
        return float(data.n - 2)
    return (u1 + u0) ** 2 / denominator


def welch_variance(data: TrialDataset, t_reference: Optional[bool] = None) -> VarianceEstimate:
    """s1^2/n1 + s0^2/n0 with arm sample variances"""
    return WelchEstimator(t_reference).estimate(data)


def pooled_t_variance(data: TrialDataset, t_reference: Optional[bool] = None) -> VarianceEstimate:
    """Two-sample t variance s_p^2 (1/n1 + 1/n0)"""
    return PooledTEstimator(t_reference).estimate(data)


class WelchEstimator(BaseVarianceEstimator):
    """Unequal-variance two-sample variance; t reference with Welch-Satterthwaite dof by default"""

    kind = VarianceKind.WELCH
    default_t_reference = True

    def estimate(self, data: TrialDataset, fit: Optional[AncovaFit] = None) -> VarianceEstimate:
        n1, n0, s1, s0 = _arm_moments(data, 2)
        dof = welch_satterthwaite_dof(data) if self.t_reference else 'normal'
        return self.log_result(VarianceEstimate(s1 / n1 + s0 / n0, self.kind, dof))


class PooledTEstimator(BaseVarianceEstimator):
    """Equal-variance two-sample variance; t reference with n - 2 dof by default"""

    kind = VarianceKind.POOLED_T
    default_t_reference = True

    def estimate(self, data: TrialDataset, fit: Optional[AncovaFit] = None) -> VarianceEstimate:
        n1, n0, s1, s0 = _arm_moments(data, 1)
        if data.n < 3:
            raise DegenerateDesignError("pooled variance needs at least 3 observations")
        pooled = ((n1 - 1) * s1 + (n0 - 1) * s0) / (data.n - 2)
        return self.log_result(VarianceEstimate(
            pooled * (1.0 / n1 + 1.0 / n0),
            self.kind,
            self.dof_reference(data.n - 2),
        ))
