#!/usr/bin/env python3
"""
Example usage of ancova-check as a library
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from ancova_check.asymptotics import compute_limits  # noqa: E402
from ancova_check.data import load_csv  # noqa: E402
from ancova_check.estimators import analyze  # noqa: E402
from ancova_check.models import DgpSpec, SimPlan, VarianceKind, unit_uniform_laws  # noqa: E402
from ancova_check.simulation import evaluate_verdicts, run_simulation  # noqa: E402

ROOT = Path(__file__).resolve().parent.parent


def example_trial_analysis():
    """Example: analyze the bundled six-row trial"""
    data = load_csv(ROOT / 'data' / 'example_trial.csv')
    report = analyze(data, list(VarianceKind))

    print(f"ANCOVA estimate {report.ancova:.4f}, unadjusted {report.unadjusted:.4f}")
    for item in report.estimators:
        print(f"  {item.kind.value:<22} SE {item.wald.std_error:.4f}  p {item.wald.p_value:.4f}")
    return report


def example_population_limits():
    """Example: how far off is the model-based variance at pi = 0.7?"""
    dgp = DgpSpec.linear(0.7, unit_uniform_laws(1), (0.0, [2.0]), (0.0, [0.5]), (1.0, 1.0), name='slopes-differ')
    limits = compute_limits(dgp)

    print(f"n Var(delta_hat) -> {limits.thm1_value:.4f}")
    print(f"n V_model        -> {limits.thm2_value:.4f}")
    print(f"{limits.diagnosis.direction.value}; predicted type I error {limits.predicted_type1:.3f}")
    return limits


def example_small_simulation():
    """Example: a quick Monte Carlo check of the same DGP"""
    dgp = DgpSpec.linear(0.7, unit_uniform_laws(1), (0.0, [2.0]), (0.0, [0.5]), (1.0, 1.0), name='slopes-differ')
    plan = SimPlan(dgp=dgp, n=500, reps=1000, seed=1)
    report = run_simulation(plan, workers=2)

    for summary in report.summaries:
        print(f"{summary.kind.value}: rejection {summary.rejection_rate:.3f} (predicted {summary.predicted_rejection:.3f})")
    for verdict in evaluate_verdicts(report, z_tol=4.0, rel_tol=0.05):
        print(f"  {'PASS' if verdict.passed else 'FAIL'} {verdict.kind} {verdict.check}")
    return report


if __name__ == "__main__":
    print("=== Trial analysis ===")
    example_trial_analysis()
    print("\n=== Population limits ===")
    example_population_limits()
    print("\n=== Small simulation ===")
    example_small_simulation()
