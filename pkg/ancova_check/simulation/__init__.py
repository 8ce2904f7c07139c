"""
Monte Carlo studies of the ANCOVA estimators against their population limits
"""

from .engine import predicted_rejection, run_simulation, simulate_records
from .plotting import coverage_frame, write_coverage_plot
from .scenarios import DEFAULT_SUITE, load_plans, load_scenario, load_suite, scenario_files
from .sweep import SUMMARY_COLUMNS, all_passed, summary_frame, sweep
from .verdicts import evaluate_verdicts

__all__ = [
    'DEFAULT_SUITE',
    'SUMMARY_COLUMNS',
    'all_passed',
    'coverage_frame',
    'evaluate_verdicts',
    'load_plans',
    'load_scenario',
    'load_suite',
    'predicted_rejection',
    'run_simulation',
    'scenario_files',
    'simulate_records',
    'summary_frame',
    'sweep',
    'write_coverage_plot',
]
