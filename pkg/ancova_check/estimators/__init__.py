"""
Treatment effect point estimators, variance estimators and Wald inference
"""

from .base_estimator import BaseVarianceEstimator
from .inference import critical_value, wald_test
from .model_based import (
    ModelBasedClassicalEstimator,
    ModelBasedPaperEstimator,
    model_based_classical,
    model_based_variance,
)
from .point import ancova_fit, unadjusted_estimate
from .registry import ESTIMATORS, analyze, estimate_variance, get_estimator
from .sandwich import SandwichEstimator, empirical_influence, sandwich_variance
from .welch import (
    PooledTEstimator,
    WelchEstimator,
    pooled_t_variance,
    welch_satterthwaite_dof,
    welch_variance,
)

__all__ = [
    'BaseVarianceEstimator',
    'ESTIMATORS',
    'ModelBasedClassicalEstimator',
    'ModelBasedPaperEstimator',
    'PooledTEstimator',
    'SandwichEstimator',
    'WelchEstimator',
    'analyze',
    'ancova_fit',
    'critical_value',
    'empirical_influence',
    'estimate_variance',
    'get_estimator',
    'model_based_classical',
    'model_based_variance',
    'pooled_t_variance',
    'sandwich_variance',
    'unadjusted_estimate',
    'wald_test',
    'welch_satterthwaite_dof',
    'welch_variance',
]
