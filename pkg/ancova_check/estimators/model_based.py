"""
Model-based (homoscedastic) variance estimators for the ANCOVA coefficient on A
"""

from typing import Optional

import numpy as np
import scipy.linalg as scl

from ancova_check.exceptions import DegenerateDesignError
from ancova_check.models.results import AncovaFit, VarianceEstimate, VarianceKind
from ancova_check.models.trial import TrialDataset

from .base_estimator import BaseVarianceEstimator


def model_based_variance(data: TrialDataset, fit: AncovaFit, t_reference: Optional[bool] = None) -> VarianceEstimate:
    """
    Var(residuals) / ((n-1) [Var(A) - Cov(W,A)' Var(W)^-1 Cov(W,A)]),
    every variance and covariance being the sample version with denominator n-1.
    """
    return ModelBasedPaperEstimator(t_reference).estimate(data, fit)


def model_based_classical(data: TrialDataset, fit: AncovaFit, t_reference: Optional[bool] = None) -> VarianceEstimate:
    """The (A, A) entry of s^2 (X'X)^-1 with s^2 = RSS / (n - k - 2)"""
    return ModelBasedClassicalEstimator(t_reference).estimate(data, fit)


def _projected_arm_variance(data: TrialDataset) -> float:
    """Var(A) - Cov(W,A)' Var(W)^-1 Cov(W,A), sample moments with ddof 1"""
    n = data.n
    arms = data.arms
    var_a = float(np.var(arms, ddof=1))
    if data.k == 0:
        return var_a

    centred_w = data.covariates - data.covariates.mean(axis=0)
    cov_wa = centred_w.T @ (arms - arms.mean()) / (n - 1)
    var_w = centred_w.T @ centred_w / (n - 1)
    try:
        solved = scl.solve(var_w, cov_wa, assume_a='pos')
    except (scl.LinAlgError, ValueError):
        raise DegenerateDesignError("sample covariance matrix of W is singular") from None
    return var_a - float(cov_wa @ solved)


class ModelBasedPaperEstimator(BaseVarianceEstimator):
    """Model-based variance with all sample moments on n-1 degrees of freedom"""

    kind = VarianceKind.MODEL_BASED_PAPER

    def estimate(self, data: TrialDataset, fit: AncovaFit) -> VarianceEstimate:
        denominator = (data.n - 1) * _projected_arm_variance(data)
        if not denominator > 0:
            raise DegenerateDesignError("model-based variance denominator is not positive (A is degenerate given W)")
        residual_variance = float(np.var(fit.residuals, ddof=1))
        return self.log_result(VarianceEstimate(
            residual_variance / denominator,
            self.kind,
            self.dof_reference(data.n - data.k - 2),
        ))


class ModelBasedClassicalEstimator(BaseVarianceEstimator):
    """Textbook OLS variance, residual variance on n-k-2 degrees of freedom"""

    kind = VarianceKind.MODEL_BASED_CLASSICAL

    def estimate(self, data: TrialDataset, fit: AncovaFit) -> VarianceEstimate:
        dof = data.n - data.k - 2
        if dof <= 0:
            raise DegenerateDesignError(f"no residual degrees of freedom (n={data.n}, k={data.k})")
        s2 = fit.rss / dof
        return self.log_result(VarianceEstimate(s2 * fit.xtx_inv_aa, self.kind, self.dof_reference(dof)))
