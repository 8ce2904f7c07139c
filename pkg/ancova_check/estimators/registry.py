"""
Lookup from variance kind to estimator, and the full analysis of one dataset
"""

import logging
from typing import Dict, Iterable, List, Optional, Type

from ancova_check.config import settings
from ancova_check.exceptions import NumericalError
from ancova_check.models.results import (
    AnalysisReport,
    AncovaFit,
    EstimatorReport,
    VarianceEstimate,
    VarianceKind,
)
from ancova_check.models.trial import TrialDataset

from .base_estimator import BaseVarianceEstimator
from .inference import wald_test
from .model_based import ModelBasedClassicalEstimator, ModelBasedPaperEstimator
from .point import ancova_fit, unadjusted_estimate
from .sandwich import SandwichEstimator
from .welch import PooledTEstimator, WelchEstimator

logger = logging.getLogger(__name__)


class _SandwichNoCorrection(SandwichEstimator):
    def __init__(self, t_reference: Optional[bool] = None):
        super().__init__('none', None, t_reference)


class _SandwichDf(SandwichEstimator):
    def __init__(self, t_reference: Optional[bool] = None):
        super().__init__('df', None, t_reference)


ESTIMATORS: Dict[VarianceKind, Type[BaseVarianceEstimator]] = {
    VarianceKind.MODEL_BASED_PAPER: ModelBasedPaperEstimator,
    VarianceKind.MODEL_BASED_CLASSICAL: ModelBasedClassicalEstimator,
    VarianceKind.SANDWICH_IF: _SandwichNoCorrection,
    VarianceKind.SANDWICH_IF_DF: _SandwichDf,
    VarianceKind.WELCH: WelchEstimator,
    VarianceKind.POOLED_T: PooledTEstimator,
}


def get_estimator(kind: VarianceKind, t_reference: Optional[bool] = None) -> BaseVarianceEstimator:
    return ESTIMATORS[VarianceKind(kind)](t_reference=t_reference)


def estimate_variance(
    data: TrialDataset,
    fit: AncovaFit,
    kind: VarianceKind,
    t_reference: Optional[bool] = None,
) -> VarianceEstimate:
    return get_estimator(kind, t_reference).estimate(data, fit)


def analyze(
    data: TrialDataset,
    kinds: Iterable[VarianceKind],
    level: Optional[float] = None,
    null_value: float = 0.0,
    t_reference: Optional[bool] = None,
) -> AnalysisReport:
    """Point estimates plus a Wald test per selected variance estimator"""
    level = settings.DEFAULT_LEVEL if level is None else level
    kinds = [VarianceKind(kind) for kind in kinds]
    fit = ancova_fit(data)
    unadjusted = unadjusted_estimate(data)
    n1, n0 = data.arm_sizes()

    warnings: List[str] = []
    margin = abs(data.pi_hat - 0.5)
    if margin > settings.PI_WARNING_MARGIN and any(kind.is_model_based for kind in kinds):
        message = (
            f"randomisation proportion {data.pi_hat:.3f} differs from 1/2 by more than "
            f"{settings.PI_WARNING_MARGIN}: the model-based standard error is in general "
            "inconsistent under unequal randomisation; prefer the sandwich estimator"
        )
        logger.warning(message)
        warnings.append(message)

    reports = []
    for kind in kinds:
        estimate = unadjusted if kind.estimand == 'unadjusted' else fit.betaA
        try:
            variance = estimate_variance(data, fit, kind, t_reference)
            wald = wald_test(estimate, variance, null_value, level)
            reports.append(EstimatorReport(kind, estimate, variance, wald))
        except NumericalError as exc:
            logger.warning(f"{kind.value}: {exc}")
            reports.append(EstimatorReport(kind, estimate, None, None, note=str(exc)))

    return AnalysisReport(
        n=data.n,
        k=data.k,
        n_treated=n1,
        n_control=n0,
        pi_hat=data.pi_hat,
        unadjusted=unadjusted,
        ancova=fit.betaA,
        level=level,
        null_value=null_value,
        estimators=reports,
        warnings=warnings,
    )
