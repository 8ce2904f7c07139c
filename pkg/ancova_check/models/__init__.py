"""
Core data models for trials, estimates, data-generating processes and simulations
"""

from .dgp import ArmPair, CovariateLaw, DgpSpec, MeanFunction, unit_uniform_laws
from .limits import AsymptoticLimits, BiasDiagnosis, BiasDirection
from .results import (
    AnalysisReport,
    AncovaFit,
    EstimatorReport,
    VarianceEstimate,
    VarianceKind,
    WaldResult,
)
from .simulation import EstimatorSummary, SimPlan, SimReport, Verdict
from .trial import DesignMatrix, TrialDataset

__all__ = [
    'AnalysisReport',
    'AncovaFit',
    'ArmPair',
    'AsymptoticLimits',
    'BiasDiagnosis',
    'BiasDirection',
    'CovariateLaw',
    'DesignMatrix',
    'DgpSpec',
    'EstimatorReport',
    'EstimatorSummary',
    'MeanFunction',
    'SimPlan',
    'SimReport',
    'TrialDataset',
    'VarianceEstimate',
    'VarianceKind',
    'Verdict',
    'WaldResult',
    'unit_uniform_laws',
]
