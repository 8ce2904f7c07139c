import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ancova_check.asymptotics import (
    analytic_limits,
    bias_diagnosis,
    compute_limits,
    diagnose,
    population_coefficients,
    theorem1_limit,
    theorem2_limit,
    unadjusted_limits,
)
from ancova_check.exceptions import DgpSpecError
from ancova_check.models import (
    AsymptoticLimits,
    BiasDirection,
    CovariateLaw,
    DgpSpec,
    MeanFunction,
    unit_uniform_laws,
)

from conftest import S1_THM1, S1_THM2, s1_dgp


class TestPopulationCoefficients:
    def test_slope_mixing(self, s1):
        beta0, betaA, betaW = population_coefficients(s1)
        assert betaW == pytest.approx((1.55,))
        assert betaA == pytest.approx(0.0)
        assert beta0 == pytest.approx(0.0)

    def test_balanced_mixing(self):
        assert population_coefficients(s1_dgp(0.5))[2] == pytest.approx((1.25,))

    def test_equal_slopes_recovered(self):
        dgp = DgpSpec.linear(0.3, unit_uniform_laws(2), (1.0, [0.4, -2.0]), (0.0, [0.4, -2.0]), (1.0, 3.0))
        beta0, betaA, betaW = population_coefficients(dgp)
        assert betaW == pytest.approx((0.4, -2.0))
        assert betaA == pytest.approx(1.0)

    def test_intercept_with_non_centred_covariates(self):
        laws = [CovariateLaw.uniform(0.0, 2.0)]
        dgp = DgpSpec.linear(0.5, laws, (1.0, [2.0]), (0.0, [1.0]), (1.0, 1.0))
        beta0, betaA, betaW = population_coefficients(dgp)
        assert betaW == pytest.approx((1.5,))
        assert betaA == pytest.approx(dgp.delta)
        assert dgp.delta == pytest.approx(2.0)
        # E[Y | A=0] = 1 = beta0 + 1.5 * E W
        assert beta0 == pytest.approx(-0.5)

    def test_degenerate_covariate_is_rejected(self):
        dgp = DgpSpec.linear(0.5, [CovariateLaw.uniform(1.0, 1.0)], (0.0, [1.0]), (0.0, [1.0]), (1.0, 1.0))
        with pytest.raises(DgpSpecError):
            population_coefficients(dgp)


class TestTheorems:
    def test_s1_values(self, s1):
        assert theorem1_limit(s1) == pytest.approx(8.7262, abs=1e-4)
        assert theorem2_limit(s1) == pytest.approx(7.0119, abs=1e-4)
        assert theorem1_limit(s1) == pytest.approx(S1_THM1, rel=1e-12)
        assert theorem2_limit(s1) == pytest.approx(S1_THM2, rel=1e-12)

    def test_s1_residual_variances(self, s1):
        limits = analytic_limits(s1)
        assert limits.v1 == pytest.approx(1.2025)
        assert limits.v0 == pytest.approx(2.1025)
        assert limits.residual_variance == pytest.approx(0.7 * 1.2025 + 0.3 * 2.1025)
        assert limits.thm2_value == pytest.approx(limits.residual_variance / (0.7 * 0.3))

    def test_unit_variances_at_half(self):
        dgp = DgpSpec.linear(0.5, [], (0.0, []), (0.0, []), (1.0, 1.0))
        assert theorem1_limit(dgp) == pytest.approx(4.0)
        assert theorem2_limit(dgp) == pytest.approx(4.0)

    def test_s2_equal_conditional_variances(self, s2):
        assert theorem1_limit(s2) == pytest.approx(1 / 0.7 + 1 / 0.3)
        assert theorem1_limit(s2) == pytest.approx(theorem2_limit(s2), rel=1e-12)

    def test_w0_welch_form(self, w0):
        limits = unadjusted_limits(w0)
        assert limits.thm1_value == pytest.approx(1 / 0.7 + 4 / 0.3)
        assert limits.thm2_value == pytest.approx(1 / 0.3 + 4 / 0.7)
        assert analytic_limits(w0).thm1_value == pytest.approx(limits.thm1_value)

    def test_unadjusted_uses_total_outcome_variance(self, s1):
        limits = unadjusted_limits(s1)
        assert limits.v1 == pytest.approx(4.0 + 1.0)
        assert limits.v0 == pytest.approx(0.25 + 1.0)
        assert limits.estimand == 'unadjusted'
        assert limits.betaW == ()

    def test_noise_variance_function_enters_through_its_mean(self):
        laws = unit_uniform_laws(1)
        dgp = DgpSpec(
            pi=0.6,
            covariate_law=laws,
            arm_mean=DgpSpec.linear(0.6, laws, (0.0, [1.0]), (0.0, [1.0]), (1.0, 1.0)).arm_mean,
            noise_variance=DgpSpec.linear(0.6, laws, (2.0, [0.5]), (1.0, [0.0]), (1.0, 1.0)).arm_mean,
        )
        limits = analytic_limits(dgp)
        assert limits.v1 == pytest.approx(2.0)
        assert limits.v0 == pytest.approx(1.0)
        assert compute_limits(dgp).route == 'analytic'

    def test_swap_algebra(self, s1):
        original = analytic_limits(s1)
        swapped = analytic_limits(s1.swapped())
        assert swapped.pi == pytest.approx(0.3)
        assert swapped.v1 == pytest.approx(original.v0)
        assert swapped.v0 == pytest.approx(original.v1)
        assert swapped.thm1_value == pytest.approx(original.thm1_value)
        assert swapped.thm2_value == pytest.approx(swapped.v1 / (1 - swapped.pi) + swapped.v0 / swapped.pi)
        assert swapped.thm2_value == pytest.approx(original.thm2_value)
        assert swapped.betaA == pytest.approx(-original.betaA)


class TestDiagnosis:
    def test_s1_anticonservative(self, s1):
        limits = compute_limits(s1, 0.95)
        assert limits.diagnosis.direction == BiasDirection.ANTICONSERVATIVE
        assert limits.predicted_type1 == pytest.approx(0.079, abs=1e-3)
        assert limits.route == 'analytic'

    def test_half_is_exact(self):
        limits = compute_limits(s1_dgp(0.5), 0.95)
        assert limits.diagnosis.direction == BiasDirection.EXACT
        assert limits.predicted_type1 == pytest.approx(0.05, rel=1e-12)

    def test_conservative_when_control_noisier_at_low_pi(self):
        dgp = DgpSpec.linear(0.3, unit_uniform_laws(1), (0.0, [1.0]), (0.0, [1.0]), (1.0, 1.5))
        limits = compute_limits(dgp)
        assert limits.diagnosis.direction == BiasDirection.CONSERVATIVE
        assert limits.thm1_value == pytest.approx(1 / 0.3 + 2.25 / 0.7)
        assert limits.thm2_value == pytest.approx(1 / 0.7 + 2.25 / 0.3)
        assert limits.predicted_type1 < 0.05

    def test_formula(self):
        diagnosis = diagnose(2.0, 1.0, 0.9)
        assert diagnosis.se_ratio == pytest.approx(math.sqrt(0.5))
        assert diagnosis.predicted_type1 == pytest.approx(2 * 0.5 * math.erfc(1.6448536269514722 * math.sqrt(0.5) / math.sqrt(2)))
        assert diagnosis.predicted_coverage == pytest.approx(1 - diagnosis.predicted_type1)

    def test_zero_limits_are_exact(self):
        diagnosis = diagnose(0.0, 0.0, 0.95)
        assert diagnosis.direction == BiasDirection.EXACT
        assert diagnosis.predicted_type1 == pytest.approx(0.05)

    def test_bias_diagnosis_respects_level(self, s1):
        limits = compute_limits(s1, 0.95)
        assert bias_diagnosis(limits, 0.99).predicted_type1 < limits.predicted_type1


class TestAllocationGrid:
    def ratios(self, family):
        return {pi: analytic_limits(family(pi)).thm2_value / analytic_limits(family(pi)).thm1_value for pi in (0.3, 0.5, 0.7)}

    def test_s1_family_is_exact_only_at_half(self):
        ratios = self.ratios(s1_dgp)
        assert ratios[0.5] == pytest.approx(1.0)
        assert ratios[0.7] == pytest.approx(S1_THM2 / S1_THM1)
        # arm roles swap with pi, so the ratio is symmetric about one half
        assert ratios[0.3] == pytest.approx(ratios[0.7])
        assert ratios[0.3] < 1.0

    def test_fixed_residual_variances_cross_at_half(self):
        def family(pi):
            return DgpSpec.linear(pi, unit_uniform_laws(1), (0.0, [1.0]), (0.0, [1.0]), (1.5, 1.0))

        ratios = self.ratios(family)
        assert ratios[0.3] < 1.0
        assert ratios[0.5] == pytest.approx(1.0)
        assert ratios[0.7] > 1.0
        assert ratios[0.7] == pytest.approx((2.25 / 0.3 + 1 / 0.7) / (2.25 / 0.7 + 1 / 0.3))


class TestDgpSpec:
    def test_delta_for_nonlinear_forms(self):
        laws = unit_uniform_laws(2)
        quadratic = MeanFunction('quadratic', 1.0, (0.0, 0.0), curvature=(1.0, 2.0))
        assert quadratic.expectation(laws) == pytest.approx(1.0 + 1.0 + 2.0)
        interaction = MeanFunction('interaction', 0.0, (0.0, 0.0), strength=3.0)
        assert interaction.expectation([CovariateLaw.uniform(0, 2), CovariateLaw.uniform(1, 3)]) == pytest.approx(6.0)
        exponential = MeanFunction('exponential-bounded', 0.0, (0.0, 0.0), amplitude=1.0, rate=(1.0, 0.0))
        h = math.sqrt(3.0)
        assert exponential.expectation(laws) == pytest.approx((math.exp(h) - math.exp(-h)) / (2 * h))

    def test_truncated_normal_moments(self):
        law = CovariateLaw.truncated_normal(0.0, 1.0, -2.0, 2.0)
        rng = np.random.default_rng(0)
        sample = law.sample(rng, 200_000)
        assert sample.min() >= -2.0 and sample.max() <= 2.0
        assert law.expectation() == pytest.approx(0.0, abs=1e-12)
        assert sample.var() == pytest.approx(law.variance(), rel=0.02)
        assert law.mgf(0.5) == pytest.approx(np.exp(0.5 * sample).mean(), rel=0.01)

    def test_json_round_trip(self, scenario_dir):
        for path in sorted(scenario_dir.glob('*.json')):
            document = json.loads(path.read_text())
            dgp = DgpSpec.from_dict(document['dgp'])
            assert DgpSpec.from_json(dgp.to_json()) == dgp

    @pytest.mark.parametrize('mutate, field_path', [
        (lambda d: d.update(pi=1.2), 'dgp.pi'),
        (lambda d: d['arm_mean']['treated'].update(form='cubic'), 'dgp.arm_mean.treated.form'),
        (lambda d: d['arm_mean']['control'].update(slope=[1.0, 2.0]), 'dgp.arm_mean.control.slope'),
        (lambda d: d['noise_sd'].update(control=-1.0), 'dgp.noise_sd.control'),
        (lambda d: d['covariate_law'][0].update(high=None), 'dgp.covariate_law[0].high'),
        (lambda d: d.pop('arm_mean'), 'dgp.arm_mean'),
    ])
    def test_schema_errors_name_the_field(self, s1, mutate, field_path):
        document = json.loads(s1.to_json())
        mutate(document)
        with pytest.raises(DgpSpecError) as info:
            DgpSpec.from_dict(document)
        assert info.value.path == field_path

    def test_limits_round_trip(self, s1):
        limits = compute_limits(s1)
        assert AsymptoticLimits.from_dict(json.loads(json.dumps(limits.to_dict()))) == limits


@st.composite
def random_specs(draw, pi=None):
    k = draw(st.integers(min_value=0, max_value=3))
    slopes = st.lists(st.floats(-3, 3), min_size=k, max_size=k)
    sd = st.floats(0.0, 3.0)
    pi = pi if pi is not None else draw(st.floats(0.05, 0.95))
    return DgpSpec.linear(
        pi,
        unit_uniform_laws(k),
        (draw(st.floats(-2, 2)), draw(slopes)),
        (draw(st.floats(-2, 2)), draw(slopes)),
        (draw(sd), draw(sd)),
    )


@given(random_specs(pi=0.5))
def test_limits_coincide_at_equal_randomisation(dgp):
    limits = analytic_limits(dgp)
    assert limits.thm1_value == limits.thm2_value


@given(random_specs())
def test_consistency_under_misspecification(dgp):
    assert population_coefficients(dgp)[1] == pytest.approx(dgp.delta, abs=1e-12)


@given(random_specs(), st.floats(0.0, 3.0))
def test_limits_coincide_when_arm_variances_agree(dgp, sd):
    equal = DgpSpec.linear(
        dgp.pi,
        dgp.covariate_law,
        (0.0, dgp.arm_mean.treated.slope),
        (0.0, dgp.arm_mean.treated.slope),
        (sd, sd),
    )
    limits = analytic_limits(equal)
    assert limits.thm1_value == pytest.approx(limits.thm2_value, rel=1e-12, abs=1e-300)
