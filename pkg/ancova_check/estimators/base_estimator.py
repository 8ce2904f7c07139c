"""
Base estimator class defining the interface for variance estimation
"""

import logging
from abc import ABC, abstractmethod
from typing import Optional

from ancova_check.models.results import AncovaFit, DofReference, VarianceEstimate, VarianceKind
from ancova_check.models.trial import TrialDataset

logger = logging.getLogger(__name__)


class BaseVarianceEstimator(ABC):
    """Abstract base class for estimators of Var(delta_hat)"""

    kind: VarianceKind
    # reference used when the caller does not choose one
    default_t_reference = False

    def __init__(self, t_reference: Optional[bool] = None):
        self.t_reference = self.default_t_reference if t_reference is None else t_reference
        self.name = self.kind.value
        self.logger = logging.getLogger(f"{__name__}.{self.name}")

    @abstractmethod
    def estimate(self, data: TrialDataset, fit: AncovaFit) -> VarianceEstimate:
        """Estimate the variance of this kind's point estimate"""
        pass

    def dof_reference(self, dof: float) -> DofReference:
        """Reference distribution for Wald tests: t with `dof` degrees of freedom, or normal"""
        return dof if self.t_reference else 'normal'

    def log_result(self, estimate: VarianceEstimate) -> VarianceEstimate:
        self.logger.debug(f"{self.name}: variance {estimate.value:.6g} (reference {estimate.dof_reference})")
        return estimate

    def __repr__(self) -> str:
        return f"{type(self).__name__}(t_reference={self.t_reference})"
