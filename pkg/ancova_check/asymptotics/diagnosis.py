"""
Direction of the model-based variance bias and the type I error it implies
"""

import math

from scipy import stats

from ancova_check.models.limits import AsymptoticLimits, BiasDiagnosis, BiasDirection

EXACT_TOLERANCE = 1e-12


def diagnose(thm1: float, thm2: float, level: float) -> BiasDiagnosis:
    """
    Compare the true asymptotic variance (thm1) with the limit of the
    model-based estimator (thm2). A Wald test at `level` then rejects a true
    null with probability 2 * Phi(-z * sqrt(thm2 / thm1)).
    """
    if not 0.0 < level < 1.0:
        raise ValueError(f"level must lie strictly between 0 and 1; got {level}")
    alpha = 1.0 - level
    scale = max(abs(thm1), abs(thm2))
    if scale == 0.0 or abs(thm1 - thm2) <= EXACT_TOLERANCE * scale:
        direction = BiasDirection.EXACT
    elif thm2 < thm1:
        direction = BiasDirection.ANTICONSERVATIVE
    else:
        direction = BiasDirection.CONSERVATIVE

    if thm1 == 0.0:
        return BiasDiagnosis(direction, alpha, 1.0, level)
    se_ratio = math.sqrt(thm2 / thm1)
    z = stats.norm.ppf(1.0 - alpha / 2.0)
    predicted = 2.0 * stats.norm.cdf(-z * se_ratio)
    return BiasDiagnosis(direction, float(predicted), se_ratio, level)


def bias_diagnosis(limits: AsymptoticLimits, level: float) -> BiasDiagnosis:
    return diagnose(limits.thm1_value, limits.thm2_value, level)
