"""
Estimation results: fitted ANCOVA models, variance estimates and Wald tests
"""

from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np


class VarianceKind(str, Enum):
    """Variance estimators for the treatment effect estimate"""
    MODEL_BASED_PAPER = 'model_based_paper'
    MODEL_BASED_CLASSICAL = 'model_based_classical'
    SANDWICH_IF = 'sandwich_if'
    SANDWICH_IF_DF = 'sandwich_if_df'
    WELCH = 'welch'
    POOLED_T = 'pooled_t'

    @property
    def estimand(self) -> str:
        """Which point estimate the variance belongs to"""
        return 'unadjusted' if self in (VarianceKind.WELCH, VarianceKind.POOLED_T) else 'ancova'

    @property
    def is_model_based(self) -> bool:
        """Homoscedastic-model variances, whose limit is the weight-swapped one"""
        return self in (VarianceKind.MODEL_BASED_PAPER, VarianceKind.MODEL_BASED_CLASSICAL, VarianceKind.POOLED_T)

    @classmethod
    def parse_list(cls, text: str) -> List['VarianceKind']:
        return [cls(item.strip()) for item in text.split(',') if item.strip()]


# "normal" or the degrees of freedom of a t reference
DofReference = Union[str, float]


@dataclass(frozen=True, eq=False)
class AncovaFit:
    """OLS fit of Y on [1, A, W]"""
    beta0: float
    betaA: float
    betaW: np.ndarray
    residuals: np.ndarray
    n: int
    k: int
    pi_hat: float
    rss: float
    condition_number: float
    xtx_inv_aa: float
    column_labels: Tuple[str, ...] = ()

    @property
    def delta_hat(self) -> float:
        """The ANCOVA treatment effect estimate"""
        return self.betaA

    @property
    def coefficients(self) -> np.ndarray:
        return np.concatenate(([self.beta0, self.betaA], self.betaW))

    def to_dict(self) -> Dict[str, Any]:
        return {
            'beta0': self.beta0,
            'betaA': self.betaA,
            'betaW': [float(b) for b in self.betaW],
            'n': self.n,
            'k': self.k,
            'pi_hat': self.pi_hat,
            'rss': self.rss,
            'condition_number': self.condition_number,
            'column_labels': list(self.column_labels),
        }


@dataclass(frozen=True)
class VarianceEstimate:
    """An estimate of Var(delta_hat), not scaled by n"""
    value: float
    kind: VarianceKind
    dof_reference: DofReference = 'normal'

    def __post_init__(self):
        if not self.value >= 0:
            raise ValueError(f"variance estimate must be non-negative, got {self.value}")
        object.__setattr__(self, 'kind', VarianceKind(self.kind))

    @property
    def std_error(self) -> float:
        return float(np.sqrt(self.value))

    def to_dict(self) -> Dict[str, Any]:
        return {'value': self.value, 'kind': self.kind.value, 'dof_reference': self.dof_reference}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'VarianceEstimate':
        return cls(float(data['value']), VarianceKind(data['kind']), data.get('dof_reference', 'normal'))


@dataclass(frozen=True)
class WaldResult:
    """Two-sided Wald test and confidence interval"""
    estimate: float
    std_error: float
    statistic: float
    p_value: float
    ci_lower: float
    ci_upper: float
    level: float
    null_value: float = 0.0
    reference: DofReference = 'normal'

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'WaldResult':
        return cls(**data)

    def covers(self, value: float) -> bool:
        return self.ci_lower <= value <= self.ci_upper


@dataclass
class EstimatorReport:
    """One selected variance estimator applied to a dataset"""
    kind: VarianceKind
    estimate: float
    variance: Optional[VarianceEstimate]
    wald: Optional[WaldResult]
    note: str = ''

    def to_dict(self) -> Dict[str, Any]:
        return {
            'kind': self.kind.value,
            'estimate': self.estimate,
            'variance': self.variance.to_dict() if self.variance else None,
            'wald': self.wald.to_dict() if self.wald else None,
            'note': self.note,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'EstimatorReport':
        return cls(
            kind=VarianceKind(data['kind']),
            estimate=data['estimate'],
            variance=VarianceEstimate.from_dict(data['variance']) if data.get('variance') else None,
            wald=WaldResult.from_dict(data['wald']) if data.get('wald') else None,
            note=data.get('note', ''),
        )


@dataclass
class AnalysisReport:
    """Everything cmd_analyze prints for one dataset"""
    n: int
    k: int
    n_treated: int
    n_control: int
    pi_hat: float
    unadjusted: float
    ancova: float
    level: float
    null_value: float
    estimators: List[EstimatorReport] = field(default_factory=list)
    warnings: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        data = {key: value for key, value in asdict(self).items() if key != 'estimators'}
        data['estimators'] = [report.to_dict() for report in self.estimators]
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'AnalysisReport':
        return cls(
            **{key: value for key, value in data.items() if key != 'estimators'},
            estimators=[EstimatorReport.from_dict(item) for item in data.get('estimators', [])],
        )
