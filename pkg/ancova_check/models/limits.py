"""
Population limits of the ANCOVA (or unadjusted) estimator and its model-based
variance estimator
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Optional, Tuple


class BiasDirection(str, Enum):
    """How the model-based variance limit compares with the true variance"""
    EXACT = 'exact'
    CONSERVATIVE = 'conservative'
    ANTICONSERVATIVE = 'anticonservative'


@dataclass(frozen=True)
class BiasDiagnosis:
    direction: BiasDirection
    predicted_type1: float
    se_ratio: float
    level: float

    @property
    def predicted_coverage(self) -> float:
        return 1.0 - self.predicted_type1

    def to_dict(self) -> Dict[str, Any]:
        return {
            'direction': self.direction.value,
            'predicted_type1': self.predicted_type1,
            'predicted_coverage': self.predicted_coverage,
            'se_ratio': self.se_ratio,
            'level': self.level,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'BiasDiagnosis':
        return cls(BiasDirection(data['direction']), data['predicted_type1'], data['se_ratio'], data['level'])


@dataclass(frozen=True)
class AsymptoticLimits:
    """
    beta_under: probability limits (beta0, betaA, betaW) of the OLS coefficients
    v1, v0: Var(Y - betaW'W | A=a)
    thm1_value: n * asymptotic variance of the estimator, v1/pi + v0/(1-pi)
    thm2_value: probability limit of n * model-based variance, v1/(1-pi) + v0/pi
    """
    beta_under: Tuple[float, float, Tuple[float, ...]]
    thm1_value: float
    thm2_value: float
    v1: float
    v0: float
    bias_ratio: float
    predicted_type1: float
    pi: float
    delta: float
    residual_variance: float
    diagnosis: BiasDiagnosis
    route: str = 'analytic'
    estimand: str = 'ancova'
    draws: Optional[int] = None
    seed: Optional[int] = None
    influence_variance: Optional[float] = None
    mc_se: Dict[str, float] = field(default_factory=dict)

    @property
    def beta0(self) -> float:
        return self.beta_under[0]

    @property
    def betaA(self) -> float:
        return self.beta_under[1]

    @property
    def betaW(self) -> Tuple[float, ...]:
        return self.beta_under[2]

    @property
    def se_ratio(self) -> float:
        return self.diagnosis.se_ratio

    def to_dict(self) -> Dict[str, Any]:
        return {
            'estimand': self.estimand,
            'route': self.route,
            'pi': self.pi,
            'delta': self.delta,
            'beta_under': {'beta0': self.beta0, 'betaA': self.betaA, 'betaW': list(self.betaW)},
            'v1': self.v1,
            'v0': self.v0,
            'residual_variance': self.residual_variance,
            'thm1_value': self.thm1_value,
            'thm2_value': self.thm2_value,
            'bias_ratio': self.bias_ratio,
            'predicted_type1': self.predicted_type1,
            'diagnosis': self.diagnosis.to_dict(),
            'draws': self.draws,
            'seed': self.seed,
            'influence_variance': self.influence_variance,
            'mc_se': dict(self.mc_se),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'AsymptoticLimits':
        beta = data['beta_under']
        return cls(
            beta_under=(beta['beta0'], beta['betaA'], tuple(beta['betaW'])),
            thm1_value=data['thm1_value'],
            thm2_value=data['thm2_value'],
            v1=data['v1'],
            v0=data['v0'],
            bias_ratio=data['bias_ratio'],
            predicted_type1=data['predicted_type1'],
            pi=data['pi'],
            delta=data['delta'],
            residual_variance=data['residual_variance'],
            diagnosis=BiasDiagnosis.from_dict(data['diagnosis']),
            route=data.get('route', 'analytic'),
            estimand=data.get('estimand', 'ancova'),
            draws=data.get('draws'),
            seed=data.get('seed'),
            influence_variance=data.get('influence_variance'),
            mc_se=dict(data.get('mc_se', {})),
        )
