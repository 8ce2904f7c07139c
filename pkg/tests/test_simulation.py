import logging
import math
from dataclasses import replace

import numpy as np
import pandas as pd
import pytest

from ancova_check.exceptions import PlanError, RedrawLimitError
from ancova_check.models import DgpSpec, SimPlan, SimReport, VarianceKind, unit_uniform_laws
from ancova_check.simulation import evaluate_verdicts, predicted_rejection, run_simulation, simulate_records
from ancova_check.simulation.engine import _partitions, reference_limits

PAPER = VarianceKind.MODEL_BASED_PAPER
SANDWICH = VarianceKind.SANDWICH_IF_DF


def small_plan(dgp, **changes):
    plan = SimPlan(dgp=dgp, n=200, reps=300, seed=17, name=dgp.name or 'small')
    return replace(plan, **changes) if changes else plan


@pytest.fixture
def s1_report(s1):
    return run_simulation(small_plan(s1, reps=400), show_progress=False)


class TestPlan:
    def test_zero_reps(self, s1):
        with pytest.raises(PlanError):
            SimPlan(dgp=s1, n=200, reps=0, seed=1)

    def test_small_n(self, s1):
        with pytest.raises(PlanError):
            SimPlan(dgp=s1, n=3, reps=10, seed=1)

    def test_unknown_assignment(self, s1):
        with pytest.raises(PlanError):
            SimPlan(dgp=s1, n=20, reps=10, seed=1, assignment='blocked')

    def test_overrides_ignore_none(self, s1):
        plan = small_plan(s1)
        assert plan.with_overrides(reps=None, n=None) is plan
        assert plan.with_overrides(reps=50).reps == 50

    def test_partitions_cover_every_replication(self):
        parts = _partitions(1003, 8)
        assert parts[0][0] == 0 and parts[-1][1] == 1003
        assert all(a[1] == b[0] for a, b in zip(parts, parts[1:]))
        assert _partitions(3, 8) == [(0, 1), (1, 2), (2, 3)]


class TestRunSimulation:
    def test_worker_count_does_not_change_the_report(self, s1):
        plan = small_plan(s1, reps=120)
        serial = run_simulation(plan, workers=1, show_progress=False)
        parallel = run_simulation(plan, workers=3, show_progress=False)
        assert parallel.to_json() == serial.to_json()

    def test_seed_changes_the_draws(self, s1):
        first = simulate_records(small_plan(s1, reps=20), show_progress=False)
        second = simulate_records(small_plan(s1, reps=20, seed=18), show_progress=False)
        assert not np.array_equal(first, second)

    def test_size_study_rejection_and_coverage_are_complementary(self, s1_report):
        for summary in s1_report.summaries:
            assert summary.zero_variance_count == 0
            assert summary.rejection_rate + summary.coverage == pytest.approx(1.0)

    def test_variance_limits(self, s1_report):
        paper, sandwich = s1_report.summary(PAPER), s1_report.summary(SANDWICH)
        assert paper.mean_n_var_hat == pytest.approx(paper.thm2, rel=0.1)
        assert sandwich.mean_n_var_hat == pytest.approx(sandwich.thm1, rel=0.1)
        assert paper.target_n_var == paper.thm2
        assert sandwich.target_n_var == sandwich.thm1
        assert paper.mean_estimate == pytest.approx(0.0, abs=5 * paper.mc_se['mean_estimate'])

    def test_monte_carlo_errors(self, s1_report):
        summary = s1_report.summary(SANDWICH)
        rate = summary.rejection_rate
        assert summary.mc_se['rejection'] == pytest.approx(np.sqrt(rate * (1 - rate) / 400))
        assert summary.mc_se['emp_n_var'] > 0

    def test_json_round_trip(self, s1_report):
        restored = SimReport.from_json(s1_report.to_json())
        assert restored.to_dict() == s1_report.to_dict()

    def test_unadjusted_estimators(self, w0):
        report = run_simulation(small_plan(w0, estimators=(VarianceKind.WELCH, VarianceKind.POOLED_T)), show_progress=False)
        welch = report.summary(VarianceKind.WELCH)
        assert welch.estimand == 'unadjusted'
        assert welch.thm1 == pytest.approx(1 / 0.7 + 4 / 0.3)
        assert welch.predicted_rejection == pytest.approx(0.05)
        assert report.summary(VarianceKind.POOLED_T).predicted_rejection == pytest.approx(report.reference['unadjusted'].predicted_type1)

    def test_zero_noise_replications_are_flagged(self, caplog):
        dgp = DgpSpec.linear(0.5, unit_uniform_laws(1), (1.0, [2.0]), (0.0, [2.0]), (0.0, 0.0), name='flat')
        with caplog.at_level(logging.WARNING):
            report = run_simulation(small_plan(dgp, reps=50), show_progress=False)
        for summary in report.summaries:
            assert summary.zero_variance_count == 50
            assert summary.rejection_rate == 0.0
            assert summary.coverage == 1.0
        assert 'numerically zero' in caplog.text

    def test_redraw_limit(self):
        dgp = DgpSpec.linear(0.05, [], (0.0, []), (0.0, []), (1.0, 1.0), name='rare')
        plan = SimPlan(dgp=dgp, n=6, reps=50, seed=3, estimators=(SANDWICH,))
        with pytest.raises(RedrawLimitError):
            run_simulation(plan, show_progress=False)

    def test_fixed_margin_is_marked_as_extrapolation(self, s2, caplog):
        with caplog.at_level(logging.WARNING):
            report = run_simulation(small_plan(s2, reps=40, assignment='fixed-margin'), show_progress=False)
        assert report.extrapolation
        assert 'extrapolation' in caplog.text

    def test_replication_dump(self, s2, tmp_path):
        report = run_simulation(small_plan(s2, reps=25, dump_replications=True), show_progress=False, dump_dir=tmp_path)
        assert report.dump_path == 'S2_replications.csv'
        frame = pd.read_csv(tmp_path / report.dump_path)
        assert list(frame.columns) == ['rep', 'delta_hat', 'model_based_paper', 'sandwich_if_df']
        assert frame['rep'].tolist() == list(range(25))
        assert (frame['sandwich_if_df'] > 0).all()

    def test_report_does_not_depend_on_dump_directory(self, s2, tmp_path):
        plan = small_plan(s2, reps=25, dump_replications=True)
        first = run_simulation(plan, show_progress=False, dump_dir=tmp_path / 'a')
        second = run_simulation(plan, show_progress=False, dump_dir=tmp_path / 'b' / 'nested')
        assert first.to_json() == second.to_json()

    def test_reference_covers_requested_estimands_only(self, s1):
        assert set(reference_limits(small_plan(s1))) == {'ancova'}
        assert set(reference_limits(small_plan(s1, estimators=(VarianceKind.WELCH,)))) == {'unadjusted'}
        both = small_plan(s1, estimators=(PAPER, VarianceKind.POOLED_T))
        assert set(reference_limits(both)) == {'ancova', 'unadjusted'}

    @pytest.mark.slow
    def test_model_based_mean_drifts_towards_its_limit(self, s1):
        gaps = []
        for n in (250, 1000, 4000):
            summary = run_simulation(small_plan(s1, n=n, reps=1000), workers=2, show_progress=False).summary(PAPER)
            gap = abs(summary.mean_n_var_hat - summary.thm2)
            se = summary.mc_se['mean_n_var_hat']
            # finite-sample bias is O(1/n)
            assert gap <= 3 * se + 4 * summary.thm2 / n
            gaps.append((gap, se))
        for (gap, se), (next_gap, next_se) in zip(gaps, gaps[1:]):
            assert next_gap <= gap + 3 * math.hypot(se, next_se)


class TestPredictedRejection:
    def test_size_study(self, s1):
        plan = small_plan(s1)
        limits = reference_limits(plan)['ancova']
        assert predicted_rejection(PAPER, limits, plan) == pytest.approx(limits.predicted_type1)
        assert predicted_rejection(SANDWICH, limits, plan) == pytest.approx(0.05)

    def test_power_grows_with_distance(self, s1):
        near = small_plan(s1, null_value=0.2)
        far = small_plan(s1, null_value=1.0)
        limits = reference_limits(near)['ancova']
        assert not near.is_size_study
        assert 0.05 < predicted_rejection(SANDWICH, limits, near) < predicted_rejection(SANDWICH, limits, far)
        assert predicted_rejection(SANDWICH, limits, far) > 0.99


class TestVerdicts:
    def test_check_names(self, s1_report):
        checks = {(v.kind, v.check) for v in evaluate_verdicts(s1_report)}
        assert checks == {
            ('model_based_paper', 'emp_n_var~thm1'),
            ('model_based_paper', 'mean_n_var_hat~thm2'),
            ('model_based_paper', 'rejection~predicted'),
            ('model_based_paper', 'direction:anticonservative'),
            ('sandwich_if_df', 'emp_n_var~thm1'),
            ('sandwich_if_df', 'mean_n_var_hat~thm1'),
            ('sandwich_if_df', 'rejection~predicted'),
        }

    def test_relative_tolerance(self, s1_report):
        summary = replace(s1_report.summary(SANDWICH), mean_n_var_hat=s1_report.summary(SANDWICH).thm1 * 1.5)
        report = replace(s1_report, summaries=(summary,))
        verdict = next(v for v in evaluate_verdicts(report, rel_tol=0.02) if v.check.startswith('mean_n_var_hat'))
        assert not verdict.passed
        assert verdict.tolerance == pytest.approx(0.02 * summary.thm1)

    def test_direction_check(self, s1_report):
        summary = replace(s1_report.summary(PAPER), rejection_rate=0.05, mc_se={**s1_report.summary(PAPER).mc_se, 'rejection': 0.005})
        report = replace(s1_report, summaries=(summary,))
        direction = next(v for v in evaluate_verdicts(report) if v.check.startswith('direction'))
        assert not direction.passed
