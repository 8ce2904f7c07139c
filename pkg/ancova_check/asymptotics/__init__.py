"""
Population limits of the ANCOVA estimator and its variance estimators
"""

from .brute_force import brute_force_limits
from .diagnosis import bias_diagnosis, diagnose
from .population import (
    analytic_limits,
    arm_residual_variances,
    compute_limits,
    population_coefficients,
    theorem1_limit,
    theorem2_limit,
    unadjusted_limits,
)

__all__ = [
    'analytic_limits',
    'arm_residual_variances',
    'bias_diagnosis',
    'brute_force_limits',
    'compute_limits',
    'diagnose',
    'population_coefficients',
    'theorem1_limit',
    'theorem2_limit',
    'unadjusted_limits',
]
