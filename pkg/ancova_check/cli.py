"""
Command-line interface: analyze a trial CSV, compute population limits, run
simulation plans and the bundled reproduction suite.

Exit codes: 0 success, 1 failed verdicts (reproduce), 2 input error,
3 numerical error.
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import pandas as pd

from ancova_check.asymptotics import compute_limits
from ancova_check.config import configure_logging, settings
from ancova_check.data import load_csv
from ancova_check.estimators import analyze
from ancova_check.exceptions import AncovaCheckError, DgpSpecError, InputError
from ancova_check.models.dgp import DgpSpec
from ancova_check.models.limits import AsymptoticLimits
from ancova_check.models.results import AnalysisReport, VarianceKind
from ancova_check.models.simulation import DEFAULT_KINDS, SimPlan, SimReport
from ancova_check.simulation import (
    DEFAULT_SUITE,
    evaluate_verdicts,
    load_plans,
    load_scenario,
    load_suite,
    scenario_files,
    summary_frame,
    sweep,
)

logger = logging.getLogger(__name__)

FORMATS = ('table', 'csv', 'json')
FAST_REPS = 2000
FAST_Z = 4.0
FAST_RELATIVE = 0.05


def _emit(text: str, output: Optional[Path], filename: str) -> None:
    print(text, end='' if text.endswith('\n') else '\n')
    if output is not None:
        output.mkdir(parents=True, exist_ok=True)
        (output / filename).write_text(text if text.endswith('\n') else text + '\n')


def _frame_text(frame: pd.DataFrame, fmt: str) -> str:
    if fmt == 'csv':
        return frame.to_csv(index=False, float_format='%.17g', lineterminator='\n')
    return frame.to_string(index=False, float_format=lambda value: f"{value:.6g}") + '\n'


def _kinds(text: Optional[str], default: Sequence[VarianceKind]) -> List[VarianceKind]:
    if not text:
        return list(default)
    try:
        return VarianceKind.parse_list(text)
    except ValueError as exc:
        raise InputError(f"--estimators: {exc}") from None


def _output_dir(args: argparse.Namespace) -> Optional[Path]:
    return Path(args.output) if args.output else None


# analyze

def analysis_frame(report: AnalysisReport) -> pd.DataFrame:
    rows = [
        {'estimator': 'unadjusted (point)', 'estimate': report.unadjusted},
        {'estimator': 'ancova (point)', 'estimate': report.ancova},
    ]
    for item in report.estimators:
        row: Dict[str, Any] = {'estimator': item.kind.value, 'estimate': item.estimate}
        if item.wald is not None:
            row.update({
                'std_error': item.wald.std_error,
                'ci_lower': item.wald.ci_lower,
                'ci_upper': item.wald.ci_upper,
                'p_value': item.wald.p_value,
                'reference': item.wald.reference,
            })
        else:
            row['note'] = item.note
        rows.append(row)
    return pd.DataFrame(rows)


def cmd_analyze(args: argparse.Namespace) -> int:
    if not args.input:
        raise InputError("analyze needs --input <trial.csv>")
    data = load_csv(args.input)
    kinds = _kinds(args.estimators, (VarianceKind.MODEL_BASED_PAPER, VarianceKind.SANDWICH_IF_DF))
    report = analyze(data, kinds, level=args.level, null_value=args.null, t_reference=args.t_reference)

    if args.format == 'json':
        _emit(json.dumps(report.to_dict(), indent=2) + '\n', _output_dir(args), 'analysis.json')
    else:
        text = _frame_text(analysis_frame(report), args.format)
        if args.format == 'table':
            header = (
                f"n={report.n} (treated {report.n_treated}, control {report.n_control}), "
                f"k={report.k}, pi_hat={report.pi_hat:.4f}, level={report.level:g}, null={report.null_value:g}\n"
            )
            text = header + text + ''.join(f"WARNING: {warning}\n" for warning in report.warnings)
        _emit(text, _output_dir(args), f"analysis.{'csv' if args.format == 'csv' else 'txt'}")
    return 0


# limits

def _load_dgp(args: argparse.Namespace) -> DgpSpec:
    if args.scenarios:
        return load_scenario(args.scenarios.split(',')[0]).dgp
    if not args.input:
        raise InputError("limits needs --input <dgp.json> or --scenarios <name>")
    path = Path(args.input)
    try:
        data = json.loads(path.read_text())
    except FileNotFoundError:
        raise InputError(f"{path}: file not found") from None
    except json.JSONDecodeError as exc:
        raise DgpSpecError('', f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from None
    if isinstance(data, dict) and 'dgp' in data:
        return DgpSpec.from_dict(data['dgp'], 'dgp')
    return DgpSpec.from_dict(data)


def limits_rows(limits: AsymptoticLimits) -> List[Dict[str, Any]]:
    rows = [
        ('route', limits.route),
        ('estimand', limits.estimand),
        ('pi', limits.pi),
        ('delta', limits.delta),
        ('beta0', limits.beta0),
        ('betaA', limits.betaA),
        *[(f"betaW{j + 1}", b) for j, b in enumerate(limits.betaW)],
        ('v1', limits.v1),
        ('v0', limits.v0),
        ('residual_variance', limits.residual_variance),
        ('thm1', limits.thm1_value),
        ('thm2', limits.thm2_value),
        ('bias_ratio', limits.bias_ratio),
        ('se_ratio', limits.se_ratio),
        ('direction', limits.diagnosis.direction.value),
        ('predicted_type1', limits.predicted_type1),
        ('predicted_coverage', limits.diagnosis.predicted_coverage),
    ]
    if limits.influence_variance is not None:
        rows.append(('influence_variance', limits.influence_variance))
    mc_keys = {'thm1': 'thm1_value', 'thm2': 'thm2_value'}
    return [
        {'quantity': key, 'value': value, 'mc_se': limits.mc_se.get(mc_keys.get(key, key), '')}
        for key, value in rows
    ]


def cmd_limits(args: argparse.Namespace) -> int:
    dgp = _load_dgp(args)
    limits = compute_limits(
        dgp,
        level=args.level,
        draws=args.draws,
        seed=args.seed,
        workers=args.workers,
        show_progress=not args.quiet,
    )
    if args.format == 'json':
        _emit(json.dumps(limits.to_dict(), indent=2) + '\n', _output_dir(args), 'limits.json')
    else:
        frame = pd.DataFrame(limits_rows(limits))
        if args.format == 'table' and not limits.mc_se:
            frame = frame.drop(columns='mc_se')
        _emit(_frame_text(frame, args.format), _output_dir(args), f"limits.{'csv' if args.format == 'csv' else 'txt'}")
    return 0


# simulate / reproduce

def _apply_overrides(plans: List[SimPlan], args: argparse.Namespace) -> List[SimPlan]:
    overrides: Dict[str, Any] = {'n': args.n, 'reps': args.reps, 'level': args.level}
    if args.seed is not None:
        overrides['seed'] = args.seed
    if args.estimators:
        overrides['estimators'] = tuple(_kinds(args.estimators, DEFAULT_KINDS))
    if getattr(args, 'dump', False):
        overrides['dump_replications'] = True
    if args.t_reference is not None:
        overrides['t_reference'] = args.t_reference
    return [plan.with_overrides(**overrides) for plan in plans]


def _report_sweep(reports: List[SimReport], args: argparse.Namespace, z_tol: float, rel_tol: float) -> str:
    verdicts = {index: evaluate_verdicts(report, z_tol, rel_tol) for index, report in enumerate(reports)}
    if args.format == 'json':
        return json.dumps([report.to_dict() for report in reports], indent=2) + '\n'
    return _frame_text(summary_frame(reports, verdicts), args.format)


def cmd_simulate(args: argparse.Namespace) -> int:
    if args.input:
        plans = load_plans(Path(args.input), args.seed)
    elif args.scenarios:
        plans = load_suite(args.scenarios.split(','), seed=args.seed)
    else:
        raise InputError("simulate needs --input <plan.json> or --scenarios <names>")
    plans = _apply_overrides(plans, args)
    output = Path(args.output or settings.OUTPUT_DIR)
    reports = sweep(plans, output, workers=args.workers, show_progress=not args.quiet)
    print(_report_sweep(reports, args, 3.0, 0.02), end='')
    logger.info(f"Reports written to {output}")
    return 0


def cmd_reproduce(args: argparse.Namespace) -> int:
    names = args.scenarios.split(',') if args.scenarios else list(DEFAULT_SUITE)
    plans = load_suite(names, seed=args.seed)
    z_tol, rel_tol = 3.0, 0.02
    if args.fast:
        z_tol, rel_tol = FAST_Z, FAST_RELATIVE
        if args.reps is None:
            args.reps = FAST_REPS
    plans = _apply_overrides(plans, args)
    output = Path(args.output or settings.OUTPUT_DIR)
    reports = sweep(plans, output, workers=args.workers, show_progress=not args.quiet, z_tol=z_tol, rel_tol=rel_tol)

    verdicts = [verdict for report in reports for verdict in evaluate_verdicts(report, z_tol, rel_tol)]
    frame = pd.DataFrame([verdict.to_dict() for verdict in verdicts])
    if args.format == 'json':
        text = json.dumps([verdict.to_dict() for verdict in verdicts], indent=2) + '\n'
    else:
        text = _frame_text(frame.drop(columns='detail'), args.format)
    print(text, end='')
    failed = sum(not verdict.passed for verdict in verdicts)
    if failed:
        logger.error(f"{failed} of {len(verdicts)} verdicts failed")
        return 1
    logger.info(f"All {len(verdicts)} verdicts passed")
    return 0


def cmd_scenarios(args: argparse.Namespace) -> int:
    rows = []
    for name, path in scenario_files().items():
        document = json.loads(path.read_text())
        rows.append({
            'name': name,
            'file': path.name,
            'pi': document['dgp']['pi'],
            'k': len(document['dgp'].get('covariate_law', [])),
            'in_suite': name in DEFAULT_SUITE,
            'description': document.get('description', ''),
        })
    frame = pd.DataFrame(rows)
    if args.format == 'json':
        print(json.dumps(rows, indent=2))
    else:
        print(_frame_text(frame, args.format), end='')
    return 0


COMMANDS = {
    'analyze': cmd_analyze,
    'limits': cmd_limits,
    'simulate': cmd_simulate,
    'reproduce': cmd_reproduce,
    'scenarios': cmd_scenarios,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", help="Trial CSV (analyze), DGP spec (limits) or plan file (simulate)")
    common.add_argument("--output", help="Output directory for report files")
    common.add_argument("--format", choices=FORMATS, default='table', help="Output format")
    common.add_argument("--seed", type=int, help=f"Random seed (default {settings.DEFAULT_SEED})")
    common.add_argument("--estimators", help="Comma-separated variance kinds")
    common.add_argument("--level", type=float, default=None, help=f"Confidence level (default {settings.DEFAULT_LEVEL})")
    common.add_argument("--workers", type=int, default=settings.N_WORKERS, help="Worker processes")
    common.add_argument(
        "--t-reference",
        action=argparse.BooleanOptionalAction,
        default=None,
        help="t references with each kind's degrees of freedom for every estimator (default: t for welch and pooled_t only)",
    )
    common.add_argument("--log-level", default=None, help="Log level for ancova_check loggers")
    common.add_argument("--quiet", action="store_true", help="Hide progress bars")

    parser = argparse.ArgumentParser(prog='ancova-check', description="Covariate-adjusted treatment effects under unequal randomisation")
    commands = parser.add_subparsers(dest='command', required=True)

    analyze_parser = commands.add_parser('analyze', parents=[common], help="Analyze a trial CSV")
    analyze_parser.add_argument("--null", type=float, default=0.0, help="Null value for the Wald tests")

    limits_parser = commands.add_parser('limits', parents=[common], help="Population limits for a DGP spec")
    limits_parser.add_argument("--draws", type=int, default=None, help="Brute-force draws for nonlinear DGPs")
    limits_parser.add_argument("--scenarios", help="Bundled scenario to take the DGP from")

    for name, text in (('simulate', "Run simulation plans"), ('reproduce', "Run the scenario suite and check verdicts")):
        sub = commands.add_parser(name, parents=[common], help=text)
        sub.add_argument("--scenarios", help="Comma-separated scenario names")
        sub.add_argument("--reps", type=int, default=None, help="Override replications per plan")
        sub.add_argument("--n", type=int, default=None, help="Override sample size per replication")
        sub.add_argument("--dump", action="store_true", help="Write per-replication CSV files")
        if name == 'reproduce':
            sub.add_argument("--fast", action="store_true", help=f"{FAST_REPS} replications with wider tolerances")

    commands.add_parser('scenarios', parents=[common], help="List bundled scenarios")
    return parser


def _check_arguments(args: argparse.Namespace) -> None:
    if args.level is not None and not 0.0 < args.level < 1.0:
        raise InputError(f"--level must lie strictly between 0 and 1; got {args.level}")
    if args.workers < 1:
        raise InputError(f"--workers must be at least 1; got {args.workers}")


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main entry point for ancova-check"""
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level)
    try:
        _check_arguments(args)
        return COMMANDS[args.command](args)
    except AncovaCheckError as exc:
        logger.error(str(exc))
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
