import math

import numpy as np
import pytest
from scipy import stats

from ancova_check.estimators import (
    analyze,
    ancova_fit,
    critical_value,
    estimate_variance,
    model_based_classical,
    model_based_variance,
    pooled_t_variance,
    sandwich_variance,
    unadjusted_estimate,
    wald_test,
    welch_satterthwaite_dof,
    welch_variance,
)
from ancova_check.exceptions import DegenerateDesignError, IllConditionedError, RankDeficientError
from ancova_check.models import TrialDataset, VarianceEstimate, VarianceKind

from conftest import random_dataset

# Hand-computed values for data/example_trial.csv:
# arm means 4 and 7/3, W balanced across arms, pooled within-arm slope 1,
# residuals (0, 1, -1, -1/3, -1/3, 2/3), RSS 8/3, A'MA = 3/2.
EXAMPLE = {
    'unadjusted': 5 / 3,
    'betaA': 5 / 3,
    'betaW': 1.0,
    'rss': 8 / 3,
    'model_based_paper': 16 / 45,
    'model_based_classical': 16 / 27,
    'sandwich_if': 8 / 27,
    'sandwich_if_df': 16 / 27,
    'welch': 10 / 9,
    'pooled_t': 10 / 9,
    'welch_dof': 100 / 29,
}


class TestExampleFixture:
    def test_point_estimates(self, example_data):
        fit = ancova_fit(example_data)
        assert unadjusted_estimate(example_data) == pytest.approx(EXAMPLE['unadjusted'], rel=1e-12)
        assert fit.betaA == pytest.approx(EXAMPLE['betaA'], rel=1e-10)
        assert fit.betaW[0] == pytest.approx(EXAMPLE['betaW'], rel=1e-10)
        assert fit.rss == pytest.approx(EXAMPLE['rss'], rel=1e-10)
        np.testing.assert_allclose(fit.residuals, [0, 1, -1, -1 / 3, -1 / 3, 2 / 3], atol=1e-12)
        assert fit.xtx_inv_aa == pytest.approx(2 / 3, rel=1e-10)
        assert fit.column_labels == ('(Intercept)', 'A', 'W1')

    @pytest.mark.parametrize('kind', list(VarianceKind))
    def test_variances(self, example_data, kind):
        fit = ancova_fit(example_data)
        variance = estimate_variance(example_data, fit, kind)
        assert variance.kind == kind
        assert variance.value == pytest.approx(EXAMPLE[kind.value], rel=1e-10)

    def test_default_references(self, example_data):
        fit = ancova_fit(example_data)
        references = {kind: estimate_variance(example_data, fit, kind).dof_reference for kind in VarianceKind}
        assert references.pop(VarianceKind.WELCH) == pytest.approx(EXAMPLE['welch_dof'])
        assert references.pop(VarianceKind.POOLED_T) == 4
        assert set(references.values()) == {'normal'}

    def test_normal_reference_can_be_forced(self, example_data):
        assert welch_variance(example_data, t_reference=False).dof_reference == 'normal'
        assert pooled_t_variance(example_data, t_reference=False).dof_reference == 'normal'

    def test_welch_wald_uses_t_reference(self, example_data):
        report = analyze(example_data, [VarianceKind.WELCH])
        wald = report.estimators[0].wald
        se = math.sqrt(10 / 9)
        assert wald.p_value == pytest.approx(2 * stats.t.sf((5 / 3) / se, 100 / 29))
        assert wald.ci_upper == pytest.approx(5 / 3 + stats.t.ppf(0.975, 100 / 29) * se)

    def test_welch_dof(self, example_data):
        assert welch_satterthwaite_dof(example_data) == pytest.approx(EXAMPLE['welch_dof'], rel=1e-12)

    def test_t_references(self, example_data):
        fit = ancova_fit(example_data)
        assert model_based_variance(example_data, fit, t_reference=True).dof_reference == 3
        assert sandwich_variance(example_data, fit, 'df', t_reference=True).dof_reference == 3
        assert pooled_t_variance(example_data, t_reference=True).dof_reference == 4
        assert welch_variance(example_data, t_reference=True).dof_reference == pytest.approx(100 / 29)

    def test_analyze_report(self, example_data):
        report = analyze(example_data, [VarianceKind.SANDWICH_IF_DF, VarianceKind.WELCH])
        assert report.warnings == []
        sandwich, welch = report.estimators
        se = math.sqrt(16 / 27)
        assert sandwich.wald.std_error == pytest.approx(se)
        assert sandwich.wald.p_value == pytest.approx(2 * stats.norm.sf((5 / 3) / se))
        assert sandwich.wald.ci_lower == pytest.approx(5 / 3 - 1.959963984540054 * se)
        assert welch.estimate == pytest.approx(5 / 3)
        assert welch.wald.std_error == pytest.approx(math.sqrt(10 / 9))


class TestAncovaFit:
    def test_without_covariates_matches_difference_in_means(self):
        data = random_dataset(3, n=30, k=0)
        assert ancova_fit(data).betaA == pytest.approx(unadjusted_estimate(data), rel=1e-10)

    def test_collinear_covariate_is_named(self):
        rng = np.random.default_rng(1)
        w = rng.normal(size=20)
        data = TrialDataset(rng.normal(size=20), np.tile([1.0, 0.0], 10), np.column_stack((w, 2 * w)), ('W1', 'W2'))
        with pytest.raises(RankDeficientError) as info:
            ancova_fit(data)
        assert info.value.column in ('W1', 'W2')

    def test_covariate_equal_to_arm_is_rank_deficient(self):
        arms = np.tile([1.0, 0.0], 5)
        data = TrialDataset(np.arange(10.0), arms, arms.reshape(-1, 1), ('copy_of_A',))
        with pytest.raises(RankDeficientError):
            ancova_fit(data)

    def test_condition_guard(self):
        rng = np.random.default_rng(2)
        w = rng.normal(size=30)
        data = TrialDataset(rng.normal(size=30), np.tile([1.0, 0.0], 15), np.column_stack((w, w + 1e-9 * rng.normal(size=30))))
        with pytest.raises((IllConditionedError, RankDeficientError)):
            ancova_fit(data, condition_limit=1e6)

    def test_too_few_observations(self):
        data = TrialDataset([1.0, 2.0, 3.0], [1, 0, 1], [[0.0], [1.0], [3.0]])
        with pytest.raises(DegenerateDesignError):
            ancova_fit(data)

    def test_residual_sums_vanish(self):
        data = random_dataset(5, n=50, k=3, pi=0.3)
        fit = ancova_fit(data)
        scale = np.abs(data.outcomes).sum()
        assert abs(fit.residuals.sum()) <= 1e-8 * scale
        assert abs(fit.residuals @ data.arms) <= 1e-8 * scale


class TestVarianceEstimators:
    def test_welch_small_example(self):
        data = TrialDataset([1.0, 3.0, 2.0, 2.0], [1, 1, 0, 0], np.empty((4, 0)))
        assert welch_variance(data).value == pytest.approx(1.0)

    def test_welch_needs_two_per_arm(self):
        data = TrialDataset([1.0, 3.0, 2.0], [1, 1, 0], np.empty((3, 0)))
        with pytest.raises(DegenerateDesignError):
            welch_variance(data)

    def test_welch_equals_pooled_for_equal_variances_and_sizes(self):
        data = TrialDataset([1.0, 3.0, 5.0, 7.0], [1, 1, 0, 0], np.empty((4, 0)))
        assert welch_variance(data).value == pytest.approx(pooled_t_variance(data).value)

    def test_pooled_t_equals_classical_without_covariates(self):
        data = random_dataset(8, n=25, k=0, pi=0.4)
        fit = ancova_fit(data)
        assert pooled_t_variance(data).value == pytest.approx(model_based_classical(data, fit).value, rel=1e-10)

    def test_zero_noise_gives_zero_variances(self):
        w = np.linspace(-1, 1, 12)
        arms = np.tile([1.0, 0.0], 6)
        data = TrialDataset(2.0 + 0.5 * arms + 3.0 * w, arms, w.reshape(-1, 1))
        fit = ancova_fit(data)
        for kind in (VarianceKind.MODEL_BASED_PAPER, VarianceKind.SANDWICH_IF, VarianceKind.SANDWICH_IF_DF):
            assert estimate_variance(data, fit, kind).value == pytest.approx(0.0, abs=1e-20)
        assert fit.betaA == pytest.approx(0.5)

    def test_constant_outcome_is_legal(self):
        arms = np.tile([1.0, 0.0], 4)
        data = TrialDataset(np.full(8, 3.0), arms, np.arange(8.0).reshape(-1, 1))
        fit = ancova_fit(data)
        assert model_based_variance(data, fit).value == pytest.approx(0.0, abs=1e-20)
        assert sandwich_variance(data, fit).value == pytest.approx(0.0, abs=1e-20)

    def test_design_pi_option(self, example_data):
        fit = ancova_fit(example_data)
        plug_in = sandwich_variance(example_data, fit, 'none')
        known = sandwich_variance(example_data, fit, 'none', design_pi=0.5)
        assert known.value == pytest.approx(plug_in.value)

    def test_unknown_correction(self, example_data):
        with pytest.raises(ValueError):
            sandwich_variance(example_data, ancova_fit(example_data), 'hc3')


class TestWaldTest:
    def test_zero_estimate(self):
        result = wald_test(0.0, VarianceEstimate(2.0, VarianceKind.WELCH))
        assert result.p_value == 1.0
        assert result.ci_lower == pytest.approx(-result.ci_upper)

    def test_normal_reference(self):
        result = wald_test(1.96, VarianceEstimate(1.0, VarianceKind.SANDWICH_IF))
        assert result.p_value == pytest.approx(0.05, abs=1e-3)
        assert result.ci_lower == pytest.approx(0.0, abs=1e-3)
        assert result.ci_upper == pytest.approx(3.92, abs=1e-3)
        assert result.covers(1.0)
        assert not result.covers(4.0)

    def test_t_reference_is_wider(self):
        normal = wald_test(1.0, VarianceEstimate(0.25, VarianceKind.MODEL_BASED_PAPER))
        t = wald_test(1.0, VarianceEstimate(0.25, VarianceKind.MODEL_BASED_PAPER, 5.0))
        assert t.p_value > normal.p_value
        assert t.ci_upper - t.ci_lower > normal.ci_upper - normal.ci_lower
        assert critical_value(0.95, 5.0) == pytest.approx(stats.t.ppf(0.975, 5))

    def test_rejects_zero_variance(self):
        with pytest.raises(DegenerateDesignError):
            wald_test(1.0, VarianceEstimate(0.0, VarianceKind.WELCH))

    def test_rejects_bad_level(self):
        with pytest.raises(ValueError):
            wald_test(1.0, VarianceEstimate(1.0, VarianceKind.WELCH), level=1.0)


class TestAnalyze:
    def test_unequal_randomisation_warning(self):
        data = random_dataset(11, n=40, k=1, pi=0.7)
        report = analyze(data, [VarianceKind.MODEL_BASED_PAPER])
        assert len(report.warnings) == 1
        assert 'inconsistent' in report.warnings[0]

    def test_no_warning_for_sandwich_only(self):
        data = random_dataset(11, n=40, k=1, pi=0.7)
        assert analyze(data, [VarianceKind.SANDWICH_IF_DF]).warnings == []

    def test_k0_ancova_equals_unadjusted(self):
        data = random_dataset(12, n=30, k=0)
        report = analyze(data, [VarianceKind.SANDWICH_IF_DF])
        assert report.ancova == pytest.approx(report.unadjusted, rel=1e-10)

    def test_json_round_trip(self, example_data):
        from ancova_check.models import AnalysisReport

        report = analyze(example_data, list(VarianceKind))
        assert AnalysisReport.from_dict(report.to_dict()).to_dict() == report.to_dict()


class TestLargeSample:
    @pytest.mark.slow
    def test_s1_coefficients_near_population_values(self, s1):
        from ancova_check.sampling import draw_arrays

        covariates, arms, outcomes = draw_arrays(s1, 100_000, seed=2024, key=(0,))
        data = TrialDataset(outcomes, arms, covariates)
        fit = ancova_fit(data)

        # heteroscedasticity-robust covariance of all coefficients
        design = np.column_stack((np.ones(data.n), data.arms, data.covariates))
        bread = np.linalg.inv(design.T @ design)
        meat = (design * fit.residuals[:, None] ** 2).T @ design
        se = np.sqrt(np.diag(bread @ meat @ bread))

        assert abs(fit.betaA - s1.delta) <= 3 * math.sqrt(sandwich_variance(data, fit).value)
        assert abs(fit.betaA - s1.delta) <= 3 * se[1]
        assert abs(fit.betaW[0] - 1.55) <= 3 * se[2]
