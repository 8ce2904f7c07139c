"""
Run a list of plans and write their reports, a summary table and a manifest
"""

import json
import logging
import re
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import pandas as pd

from ancova_check.models.simulation import SimPlan, SimReport, Verdict

from .engine import run_simulation
from .plotting import write_coverage_plot
from .verdicts import DEFAULT_RELATIVE, DEFAULT_Z, evaluate_verdicts

logger = logging.getLogger(__name__)

SUMMARY_COLUMNS = [
    'scenario', 'pi', 'n', 'estimator', 'mean_n_var_hat', 'thm2', 'emp_n_var', 'thm1',
    'rejection', 'predicted_rejection', 'coverage', 'verdict',
]


def report_filename(index: int, plan: SimPlan) -> str:
    slug = re.sub(r'[^a-z0-9]+', '_', plan.label.lower()).strip('_') or 'plan'
    return f"{index:02d}_{slug}.json"


def summary_frame(reports: Sequence[SimReport], verdicts: Dict[int, List[Verdict]]) -> pd.DataFrame:
    rows = []
    for index, report in enumerate(reports):
        for summary in report.summaries:
            checks = [v for v in verdicts.get(index, []) if v.kind == summary.kind.value]
            rows.append({
                'scenario': report.plan.label,
                'pi': report.plan.dgp.pi,
                'n': report.plan.n,
                'estimator': summary.kind.value,
                'mean_n_var_hat': summary.mean_n_var_hat,
                'thm2': summary.thm2,
                'emp_n_var': summary.emp_n_var,
                'thm1': summary.thm1,
                'rejection': summary.rejection_rate,
                'predicted_rejection': summary.predicted_rejection,
                'coverage': summary.coverage,
                'verdict': 'pass' if all(v.passed for v in checks) else 'fail',
            })
    return pd.DataFrame(rows, columns=SUMMARY_COLUMNS)


def _write_manifest(output: Path, completed: List[Dict[str, str]], failed: Optional[str]) -> None:
    manifest = {'completed': completed, 'failed': failed}
    (output / 'manifest.json').write_text(json.dumps(manifest, indent=2) + '\n')
    logger.info(f"Manifest: {len(completed)} completed plan(s){f', failed at {failed}' if failed else ''}")


def sweep(
    plans: Sequence[SimPlan],
    output: Path,
    workers: int = 1,
    show_progress: bool = True,
    z_tol: float = DEFAULT_Z,
    rel_tol: float = DEFAULT_RELATIVE,
) -> List[SimReport]:
    """
    Run each plan in turn, writing one JSON report per plan, summary.csv,
    verdicts.csv, the coverage plot files and manifest.json.

    If a plan fails, reports of completed plans and the manifest are kept and
    the error is re-raised.
    """
    output = Path(output)
    output.mkdir(parents=True, exist_ok=True)
    reports: List[SimReport] = []
    verdicts: Dict[int, List[Verdict]] = {}
    completed: List[Dict[str, str]] = []

    for index, plan in enumerate(plans):
        try:
            report = run_simulation(plan, workers=workers, show_progress=show_progress, dump_dir=output)
        except Exception:
            logger.error(f"Plan {plan.label} failed after {len(completed)} completed plan(s)")
            _write_manifest(output, completed, plan.label)
            raise
        filename = report_filename(index, plan)
        (output / filename).write_text(report.to_json())
        reports.append(report)
        verdicts[index] = evaluate_verdicts(report, z_tol, rel_tol)
        completed.append({'name': plan.label, 'report': filename})
        logger.info(f"Completed {plan.label} ({index + 1}/{len(plans)})")

    summary_frame(reports, verdicts).to_csv(
        output / 'summary.csv', index=False, float_format='%.17g', lineterminator='\n',
    )
    rows = [verdict.to_dict() for index in sorted(verdicts) for verdict in verdicts[index]]
    pd.DataFrame(rows, columns=list(Verdict.__dataclass_fields__)).to_csv(
        output / 'verdicts.csv', index=False, float_format='%.17g', lineterminator='\n',
    )
    if reports:
        write_coverage_plot(reports, output, level=reports[0].plan.level)
    _write_manifest(output, completed, None)
    return reports


def all_passed(reports: Sequence[SimReport], z_tol: float = DEFAULT_Z, rel_tol: float = DEFAULT_RELATIVE) -> bool:
    return all(v.passed for report in reports for v in evaluate_verdicts(report, z_tol, rel_tol))
