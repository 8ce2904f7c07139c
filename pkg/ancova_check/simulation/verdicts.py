"""
Pass/fail comparison of a SimReport with the population limits
"""

import logging
from typing import List

from ancova_check.models.limits import BiasDirection
from ancova_check.models.simulation import EstimatorSummary, SimReport, Verdict

logger = logging.getLogger(__name__)

DEFAULT_Z = 3.0
DEFAULT_RELATIVE = 0.02


def _within_z(scenario: str, summary: EstimatorSummary, check: str, observed: float, expected: float, se: float, z: float) -> Verdict:
    tolerance = z * se
    return Verdict(
        scenario=scenario,
        kind=summary.kind.value,
        check=check,
        observed=observed,
        expected=expected,
        tolerance=tolerance,
        passed=abs(observed - expected) <= tolerance,
        detail=f"|{observed:.6g} - {expected:.6g}| <= {z:g} MC SE",
    )


def _direction(scenario: str, summary: EstimatorSummary, direction: BiasDirection, nominal: float, z: float) -> Verdict:
    se = summary.mc_se['rejection']
    rate = summary.rejection_rate
    if direction == BiasDirection.ANTICONSERVATIVE:
        passed, detail = rate > nominal + z * se, f"rejection above {nominal:g} by more than {z:g} MC SE"
    elif direction == BiasDirection.CONSERVATIVE:
        passed, detail = rate < nominal - z * se, f"rejection below {nominal:g} by more than {z:g} MC SE"
    else:
        passed, detail = abs(rate - nominal) <= z * se, f"rejection within {z:g} MC SE of {nominal:g}"
    return Verdict(scenario, summary.kind.value, f"direction:{direction.value}", rate, nominal, z * se, passed, detail)


def evaluate_verdicts(report: SimReport, z_tol: float = DEFAULT_Z, rel_tol: float = DEFAULT_RELATIVE) -> List[Verdict]:
    """
    Per estimator: empirical n Var(delta_hat) against thm1, mean n V_hat
    against its limit, the rejection rate against its prediction, and for
    model-based kinds the bias direction. Only size studies get the
    direction check.
    """
    scenario = report.plan.label
    nominal = 1.0 - report.plan.level
    verdicts: List[Verdict] = []
    for summary in report.summaries:
        verdicts.append(_within_z(
            scenario, summary, 'emp_n_var~thm1', summary.emp_n_var, summary.thm1, summary.mc_se['emp_n_var'], z_tol,
        ))

        target = summary.target_n_var
        tolerance = rel_tol * abs(target)
        verdicts.append(Verdict(
            scenario=scenario,
            kind=summary.kind.value,
            check='mean_n_var_hat~' + ('thm2' if summary.kind.is_model_based else 'thm1'),
            observed=summary.mean_n_var_hat,
            expected=target,
            tolerance=tolerance,
            passed=abs(summary.mean_n_var_hat - target) <= tolerance,
            detail=f"relative difference within {rel_tol:.0%}",
        ))

        verdicts.append(_within_z(
            scenario, summary, 'rejection~predicted', summary.rejection_rate, summary.predicted_rejection,
            summary.mc_se['rejection'], z_tol,
        ))

        if summary.kind.is_model_based and report.plan.is_size_study:
            direction = report.reference[summary.estimand].diagnosis.direction
            verdicts.append(_direction(scenario, summary, direction, nominal, z_tol))

    failed = [verdict for verdict in verdicts if not verdict.passed]
    for verdict in failed:
        logger.warning(f"{scenario}: {verdict.kind} failed {verdict.check} (observed {verdict.observed:.6g}, expected {verdict.expected:.6g})")
    return verdicts
