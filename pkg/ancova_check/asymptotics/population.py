"""
Population quantities of the ANCOVA estimator for a DgpSpec.

With A independent of W and P(A=1) = pi, the OLS coefficients converge to
beta_under solving the population normal equations. Writing
v_a = Var(Y - betaW'W | A=a):

    n * Var(delta_hat)         -> v1/pi + v0/(1-pi)      (true asymptotic variance)
    n * model-based variance   -> v1/(1-pi) + v0/pi      (its probability limit)

Linear arm means have closed forms; other catalogue forms go through the
brute-force oracle.
"""

import logging
from typing import Optional, Tuple

import numpy as np

from ancova_check.config import settings
from ancova_check.exceptions import DgpSpecError
from ancova_check.models.dgp import DgpSpec
from ancova_check.models.limits import AsymptoticLimits

from .diagnosis import diagnose

logger = logging.getLogger(__name__)

Coefficients = Tuple[float, float, Tuple[float, ...]]


def _check_covariate_variance(dgp: DgpSpec) -> np.ndarray:
    cov = dgp.covariate_cov()
    for j, variance in enumerate(np.diag(cov)):
        if not variance > 0:
            raise DgpSpecError(f"covariate_law[{j}]", "has zero variance, so Var(W) is singular")
    return cov


def _expected_noise_variance(dgp: DgpSpec, a: int) -> float:
    if dgp.noise_sd is not None:
        return float(dgp.noise_sd.for_arm(a)) ** 2
    return dgp.noise_variance.for_arm(a).expectation(dgp.covariate_law)


def population_coefficients(dgp: DgpSpec, draws: Optional[int] = None, seed: Optional[int] = None) -> Coefficients:
    """
    Probability limits (beta0, betaA, betaW) of the OLS coefficients.

    Linear means mix the arm slopes, betaW = pi*b1 + (1-pi)*b0; other forms
    use the cached brute-force fit.
    """
    cov = _check_covariate_variance(dgp)
    if not dgp.is_analytic:
        from .brute_force import brute_force_limits
        return brute_force_limits(dgp, draws or settings.REFERENCE_DRAWS, settings.DEFAULT_SEED if seed is None else seed).beta_under

    treated, control = dgp.arm_mean.treated, dgp.arm_mean.control
    b1 = np.asarray(treated.slope, dtype=float)
    b0 = np.asarray(control.slope, dtype=float)
    if dgp.k:
        cross = cov @ (dgp.pi * b1 + (1.0 - dgp.pi) * b0)
        beta_w = np.linalg.solve(cov, cross)
    else:
        beta_w = np.empty(0)
    mu = dgp.covariate_mean()
    beta0 = control.intercept + float((b0 - beta_w) @ mu) if dgp.k else control.intercept
    return beta0, dgp.delta, tuple(float(b) for b in beta_w)


def _arm_residual_variances(dgp: DgpSpec, beta_w: np.ndarray) -> Tuple[float, float]:
    cov = dgp.covariate_cov()
    variances = []
    for a in (1, 0):
        slope = np.asarray(dgp.arm_mean.for_arm(a).slope, dtype=float)
        gap = slope - beta_w
        explained = float(gap @ cov @ gap) if dgp.k else 0.0
        variances.append(explained + _expected_noise_variance(dgp, a))
    return variances[0], variances[1]


def arm_residual_variances(dgp: DgpSpec) -> Tuple[float, float]:
    """(v1, v0) for a DGP with linear arm means"""
    if not dgp.is_analytic:
        from .brute_force import brute_force_limits
        limits = brute_force_limits(dgp, settings.REFERENCE_DRAWS, settings.DEFAULT_SEED)
        return limits.v1, limits.v0
    _, _, beta_w = population_coefficients(dgp)
    return _arm_residual_variances(dgp, np.asarray(beta_w))


def theorem1_limit(dgp: DgpSpec) -> float:
    """True asymptotic variance of sqrt(n) (delta_hat - delta): v1/pi + v0/(1-pi)"""
    v1, v0 = arm_residual_variances(dgp)
    return v1 / dgp.pi + v0 / (1.0 - dgp.pi)


def theorem2_limit(dgp: DgpSpec) -> float:
    """Probability limit of n times the model-based variance: v1/(1-pi) + v0/pi"""
    v1, v0 = arm_residual_variances(dgp)
    return v1 / (1.0 - dgp.pi) + v0 / dgp.pi


def assemble_limits(
    dgp: DgpSpec,
    beta: Coefficients,
    v1: float,
    v0: float,
    level: float,
    route: str,
    estimand: str = 'ancova',
    **extra,
) -> AsymptoticLimits:
    pi = dgp.pi
    thm1 = v1 / pi + v0 / (1.0 - pi)
    thm2 = v1 / (1.0 - pi) + v0 / pi
    diagnosis = diagnose(thm1, thm2, level)
    return AsymptoticLimits(
        beta_under=(float(beta[0]), float(beta[1]), tuple(float(b) for b in beta[2])),
        thm1_value=thm1,
        thm2_value=thm2,
        v1=v1,
        v0=v0,
        bias_ratio=thm2 / thm1 if thm1 > 0 else 1.0,
        predicted_type1=diagnosis.predicted_type1,
        pi=pi,
        delta=dgp.delta,
        residual_variance=pi * v1 + (1.0 - pi) * v0,
        diagnosis=diagnosis,
        route=route,
        estimand=estimand,
        **extra,
    )


def analytic_limits(dgp: DgpSpec, level: float = 0.95) -> AsymptoticLimits:
    beta = population_coefficients(dgp)
    v1, v0 = _arm_residual_variances(dgp, np.asarray(beta[2]))
    return assemble_limits(dgp, beta, v1, v0, level, 'analytic')


def unadjusted_limits(dgp: DgpSpec, level: float = 0.95, draws: Optional[int] = None, seed: Optional[int] = None) -> AsymptoticLimits:
    """
    Limits for the difference in means (no covariates in the regression):
    v_a = Var(Y | A=a), giving the Welch-form truth and the pooled-t limit.
    """
    if not dgp.is_analytic:
        from .brute_force import brute_force_limits
        return brute_force_limits(
            dgp,
            draws or settings.REFERENCE_DRAWS,
            settings.DEFAULT_SEED if seed is None else seed,
            level=level,
            adjust=False,
        )
    _check_covariate_variance(dgp)
    cov = dgp.covariate_cov()
    mu = dgp.covariate_mean()
    variances = []
    for a in (1, 0):
        slope = np.asarray(dgp.arm_mean.for_arm(a).slope, dtype=float)
        explained = float(slope @ cov @ slope) if dgp.k else 0.0
        variances.append(explained + _expected_noise_variance(dgp, a))
    control = dgp.arm_mean.control
    beta0 = control.intercept + (float(np.dot(control.slope, mu)) if dgp.k else 0.0)
    return assemble_limits(dgp, (beta0, dgp.delta, ()), variances[0], variances[1], level, 'analytic', 'unadjusted')


def compute_limits(
    dgp: DgpSpec,
    level: Optional[float] = None,
    draws: Optional[int] = None,
    seed: Optional[int] = None,
    workers: int = 1,
    show_progress: bool = False,
) -> AsymptoticLimits:
    """Analytic limits when the arm means are linear, brute force otherwise"""
    level = settings.DEFAULT_LEVEL if level is None else level
    if dgp.is_analytic:
        logger.info(f"Limits for {dgp.name or 'spec'}: analytic route")
        return analytic_limits(dgp, level)
    from .brute_force import brute_force_limits
    draws = settings.BRUTE_FORCE_DRAWS if draws is None else draws
    logger.info(f"Limits for {dgp.name or 'spec'}: nonlinear arm means, brute-force route with {draws} draws")
    return brute_force_limits(
        dgp,
        draws,
        settings.DEFAULT_SEED if seed is None else seed,
        level=level,
        workers=workers,
        show_progress=show_progress,
    )
