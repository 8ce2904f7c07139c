"""
Influence-function (sandwich) variance for the ANCOVA estimator.

The plug-in influence value of observation i is

    IF_i = (A_i - pi) / (pi (1 - pi)) * r_i

with r_i the OLS residual; the variance estimate is sum(IF_i^2) / n^2,
optionally inflated by n / (n - k - 2).
"""

from typing import Optional

import numpy as np

from ancova_check.exceptions import DegenerateDesignError
from ancova_check.models.results import AncovaFit, VarianceEstimate, VarianceKind
from ancova_check.models.trial import TrialDataset

from .base_estimator import BaseVarianceEstimator

CORRECTIONS = ('none', 'df')


def empirical_influence(data: TrialDataset, fit: AncovaFit, design_pi: Optional[float] = None) -> np.ndarray:
    """
    Influence values of delta_hat for each observation.

    design_pi=None plugs in the sample proportion treated; pass the known
    randomisation probability to use it instead.
    """
    if design_pi is None:
        pi = fit.pi_hat
    else:
        pi = float(design_pi)
        if not 0.0 < pi < 1.0:
            raise DegenerateDesignError(f"design randomisation probability must lie in (0, 1); got {pi}")
    return (data.arms - pi) / (pi * (1.0 - pi)) * fit.residuals


def sandwich_variance(
    data: TrialDataset,
    fit: AncovaFit,
    correction: str = 'df',
    design_pi: Optional[float] = None,
    t_reference: Optional[bool] = None,
) -> VarianceEstimate:
    return SandwichEstimator(correction, design_pi, t_reference).estimate(data, fit)


class SandwichEstimator(BaseVarianceEstimator):
    """Variance of the empirical influence function"""

    def __init__(self, correction: str = 'df', design_pi: Optional[float] = None, t_reference: Optional[bool] = None):
        if correction not in CORRECTIONS:
            raise ValueError(f"correction must be one of {CORRECTIONS}; got {correction!r}")
        self.correction = correction
        self.design_pi = design_pi
        self.kind = VarianceKind.SANDWICH_IF_DF if correction == 'df' else VarianceKind.SANDWICH_IF
        super().__init__(t_reference)

    def estimate(self, data: TrialDataset, fit: AncovaFit) -> VarianceEstimate:
        influence = empirical_influence(data, fit, self.design_pi)
        n = data.n
        dof = n - data.k - 2
        value = float(influence @ influence) / n ** 2
        if self.correction == 'df':
            value *= n / dof
        return self.log_result(VarianceEstimate(value, self.kind, self.dof_reference(dof)))
