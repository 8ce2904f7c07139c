"""
Monte Carlo engine: draw trials from a plan's DGP, apply every requested
estimator and aggregate against the population limits.
"""

import logging
import math
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import numpy as np
import pandas as pd
from joblib import Parallel, delayed
from scipy import stats
from tqdm import tqdm

from ancova_check.asymptotics import compute_limits, unadjusted_limits
from ancova_check.config import settings
from ancova_check.estimators import ancova_fit, critical_value, get_estimator, unadjusted_estimate
from ancova_check.exceptions import NumericalError, RedrawLimitError, TrialDataError
from ancova_check.models.limits import AsymptoticLimits
from ancova_check.models.results import VarianceKind
from ancova_check.models.simulation import EstimatorSummary, SimPlan, SimReport
from ancova_check.models.trial import TrialDataset
from ancova_check.sampling import draw_arrays

logger = logging.getLogger(__name__)

# Record columns ahead of the per-kind variance and critical-value blocks
ATTEMPTS, ANCOVA, UNADJUSTED, SCALE = range(4)
_FIXED = 4


def _redraw_budget(plan: SimPlan) -> int:
    return math.floor(settings.REDRAW_ABORT_RATE * plan.reps)


def _replicate(plan: SimPlan, rep: int, estimators, fixed_critical: Optional[float]) -> np.ndarray:
    """One record for replication `rep`, redrawing degenerate designs on fresh substreams"""
    budget = _redraw_budget(plan)
    attempt = 0
    while True:
        covariates, arms, outcomes = draw_arrays(plan.dgp, plan.n, plan.seed, (rep, attempt), plan.assignment)
        try:
            data = TrialDataset(outcomes, arms, covariates)
            if min(data.arm_sizes()) < 2:
                raise TrialDataError("an arm has fewer than two observations")
            fit = ancova_fit(data)
            variances = [estimator.estimate(data, fit) for estimator in estimators]
            break
        except (TrialDataError, NumericalError) as exc:
            logger.debug(f"{plan.label}: replication {rep} attempt {attempt} redrawn ({exc})")
            attempt += 1
            if attempt > budget:
                raise RedrawLimitError(
                    f"{plan.label}: replication {rep} needed more than {budget} redraws; "
                    f"the redraw rate exceeds {settings.REDRAW_ABORT_RATE:.0%}. "
                    "Increase n or move pi away from 0 and 1"
                ) from None

    k = len(estimators)
    record = np.empty(_FIXED + 2 * k)
    record[ATTEMPTS] = attempt
    record[ANCOVA] = fit.betaA
    record[UNADJUSTED] = unadjusted_estimate(data)
    record[SCALE] = 1.0 + float(np.max(np.abs(outcomes)))
    record[_FIXED:_FIXED + k] = [variance.value for variance in variances]
    if fixed_critical is not None:
        record[_FIXED + k:] = fixed_critical
    else:
        record[_FIXED + k:] = [critical_value(plan.level, variance.dof_reference) for variance in variances]
    return record


def _run_partition(plan: SimPlan, start: int, stop: int) -> np.ndarray:
    estimators = [get_estimator(kind, plan.t_reference) for kind in plan.estimators]
    fixed_critical = None if any(estimator.t_reference for estimator in estimators) else critical_value(plan.level)
    return np.vstack([_replicate(plan, rep, estimators, fixed_critical) for rep in range(start, stop)])


def _partitions(reps: int, workers: int) -> List[Tuple[int, int]]:
    count = min(reps, max(1, workers) * 4)
    edges = np.linspace(0, reps, count + 1).astype(int)
    return [(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:]) if b > a]


def simulate_records(plan: SimPlan, workers: int = 1, show_progress: bool = True) -> np.ndarray:
    """
    Per-replication records in replication order.

    Columns: attempts, ANCOVA estimate, unadjusted estimate, outcome scale,
    then one variance column and one critical-value column per estimator.
    """
    parts = tqdm(_partitions(plan.reps, workers), desc=plan.label, disable=not show_progress)
    if workers > 1:
        blocks = Parallel(n_jobs=workers, backend='loky')(
            delayed(_run_partition)(plan, start, stop) for start, stop in parts
        )
    else:
        blocks = [_run_partition(plan, start, stop) for start, stop in parts]
    return np.vstack(blocks)


def _mean_se(values: np.ndarray) -> float:
    return float(values.std(ddof=1) / math.sqrt(values.size)) if values.size > 1 else 0.0


def _variance_with_se(values: np.ndarray) -> Tuple[float, float]:
    """Sample variance and its fourth-moment Monte Carlo standard error"""
    if values.size < 2:
        return 0.0, 0.0
    centred = values - values.mean()
    m2 = float(np.mean(centred ** 2))
    m4 = float(np.mean(centred ** 4))
    return float(values.var(ddof=1)), math.sqrt(max(m4 - m2 ** 2, 0.0) / values.size)


def _binomial_se(rate: float, reps: int) -> float:
    return math.sqrt(rate * (1.0 - rate) / reps)


def predicted_rejection(kind: VarianceKind, limits: AsymptoticLimits, plan: SimPlan) -> float:
    """
    Asymptotic rejection probability of the Wald test at plan.target.

    Size studies use the bias diagnosis for model-based kinds and the nominal
    level otherwise; other targets use the normal power approximation.
    """
    if plan.is_size_study:
        return limits.predicted_type1 if kind.is_model_based else 1.0 - plan.level
    if not limits.thm1_value > 0:
        return 1.0
    target = limits.thm2_value if kind.is_model_based else limits.thm1_value
    z = critical_value(plan.level)
    shift = (limits.delta - plan.target) * math.sqrt(plan.n)
    spread = math.sqrt(limits.thm1_value)
    half_width = z * math.sqrt(target)
    return float(stats.norm.cdf((-half_width - shift) / spread) + stats.norm.sf((half_width - shift) / spread))


def summarise(plan: SimPlan, records: np.ndarray, reference: Dict[str, AsymptoticLimits]) -> Tuple[EstimatorSummary, ...]:
    k = len(plan.estimators)
    n = plan.n
    delta = plan.dgp.delta
    tolerance = settings.ZERO_SE_TOLERANCE * records[:, SCALE]
    summaries = []
    for j, kind in enumerate(plan.estimators):
        estimates = records[:, ANCOVA if kind.estimand == 'ancova' else UNADJUSTED]
        variances = records[:, _FIXED + j]
        critical = records[:, _FIXED + k + j]
        std_errors = np.sqrt(variances)
        zero = std_errors <= tolerance
        half_width = np.where(zero, tolerance, critical * std_errors)
        rejection = float(np.mean(np.abs(estimates - plan.target) > half_width))
        coverage = float(np.mean(np.abs(estimates - delta) <= half_width))
        emp_var, emp_var_se = _variance_with_se(estimates)
        limits = reference[kind.estimand]
        if zero.any():
            logger.warning(f"{plan.label}: {kind.value} variance is numerically zero in {int(zero.sum())} replications")
        summaries.append(EstimatorSummary(
            kind=kind,
            estimand=kind.estimand,
            mean_estimate=float(estimates.mean()),
            emp_n_var=n * emp_var,
            mean_n_var_hat=float(np.mean(n * variances)),
            rejection_rate=rejection,
            coverage=coverage,
            thm1=limits.thm1_value,
            thm2=limits.thm2_value,
            predicted_rejection=predicted_rejection(kind, limits, plan),
            mc_se={
                'mean_estimate': _mean_se(estimates),
                'emp_n_var': n * emp_var_se,
                'mean_n_var_hat': _mean_se(n * variances),
                'rejection': _binomial_se(rejection, plan.reps),
                'coverage': _binomial_se(coverage, plan.reps),
            },
            zero_variance_count=int(zero.sum()),
        ))
    return tuple(summaries)


def reference_limits(plan: SimPlan, workers: int = 1) -> Dict[str, AsymptoticLimits]:
    """Limits at the plan's level for each estimand the plan's estimators target"""
    estimands = {kind.estimand for kind in plan.estimators}
    reference: Dict[str, AsymptoticLimits] = {}
    if 'ancova' in estimands:
        reference['ancova'] = compute_limits(plan.dgp, plan.level, draws=settings.REFERENCE_DRAWS, workers=workers)
    if 'unadjusted' in estimands:
        reference['unadjusted'] = unadjusted_limits(plan.dgp, plan.level, draws=settings.REFERENCE_DRAWS)
    return reference


def write_replications(plan: SimPlan, records: np.ndarray, path: Path) -> Path:
    k = len(plan.estimators)
    frame = pd.DataFrame({'rep': np.arange(plan.reps), 'delta_hat': records[:, ANCOVA]})
    for j, kind in enumerate(plan.estimators):
        frame[kind.value] = records[:, _FIXED + j]
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format='%.17g', lineterminator='\n')
    logger.info(f"{plan.label}: wrote {k} variance columns for {plan.reps} replications to {path}")
    return path


def run_simulation(
    plan: SimPlan,
    workers: int = 1,
    show_progress: bool = True,
    dump_dir: Optional[Path] = None,
) -> SimReport:
    """
    Run every replication of `plan` and aggregate.

    Replication r draws from substreams keyed by (seed, r, attempt), so the
    report is identical for any number of workers.
    """
    logger.info(
        f"Simulating {plan.label}: n={plan.n}, reps={plan.reps}, pi={plan.dgp.pi}, "
        f"assignment={plan.assignment}, estimators={','.join(kind.value for kind in plan.estimators)}"
    )
    if plan.assignment == 'fixed-margin':
        logger.warning(f"{plan.label}: fixed-margin assignment; limits derived for simple randomisation are an extrapolation")

    records = simulate_records(plan, workers, show_progress)
    redraws = int(records[:, ATTEMPTS].sum())
    if redraws > settings.REDRAW_ABORT_RATE * plan.reps:
        raise RedrawLimitError(
            f"{plan.label}: {redraws} redraws in {plan.reps} replications exceeds "
            f"{settings.REDRAW_ABORT_RATE:.0%}; increase n or move pi away from 0 and 1"
        )
    if redraws:
        logger.info(f"{plan.label}: {redraws} degenerate replications redrawn")

    reference = reference_limits(plan, workers)
    dump_path = None
    if plan.dump_replications:
        # file name only, relative to the output directory
        target = Path(dump_dir or settings.OUTPUT_DIR) / f"{plan.label}_replications.csv"
        dump_path = write_replications(plan, records, target).name

    return SimReport(
        plan=plan,
        summaries=summarise(plan, records, reference),
        reference=reference,
        redraws=redraws,
        extrapolation=plan.assignment == 'fixed-margin',
        dump_path=dump_path,
    )
