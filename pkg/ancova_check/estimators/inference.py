"""
Wald tests and confidence intervals
"""

import math

from scipy import stats

from ancova_check.exceptions import DegenerateDesignError
from ancova_check.models.results import DofReference, VarianceEstimate, WaldResult


def reference_distribution(reference: DofReference):
    if reference == 'normal':
        return stats.norm
    return stats.t(df=float(reference))


def critical_value(level: float, reference: DofReference = 'normal') -> float:
    """Two-sided quantile for a confidence level"""
    return float(reference_distribution(reference).ppf(0.5 + level / 2.0))


def wald_test(
    estimate: float,
    variance: VarianceEstimate,
    null_value: float = 0.0,
    level: float = 0.95,
) -> WaldResult:
    """
    Two-sided Wald test of delta = null_value and the matching confidence
    interval; the reference distribution comes from variance.dof_reference.
    """
    if not 0.0 < level < 1.0:
        raise ValueError(f"level must lie strictly between 0 and 1; got {level}")
    if not variance.value > 0:
        raise DegenerateDesignError(f"Wald test needs a positive variance ({variance.kind.value} is zero)")

    std_error = math.sqrt(variance.value)
    statistic = (estimate - null_value) / std_error
    distribution = reference_distribution(variance.dof_reference)
    p_value = float(min(1.0, 2.0 * distribution.sf(abs(statistic))))
    quantile = critical_value(level, variance.dof_reference)
    return WaldResult(
        estimate=float(estimate),
        std_error=std_error,
        statistic=float(statistic),
        p_value=p_value,
        ci_lower=float(estimate - quantile * std_error),
        ci_upper=float(estimate + quantile * std_error),
        level=level,
        null_value=float(null_value),
        reference=variance.dof_reference,
    )
