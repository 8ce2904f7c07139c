"""
Simulation plans, reports and verdicts
"""

import json
from dataclasses import asdict, dataclass, replace
from typing import Any, Dict, Optional, Tuple

from ancova_check.exceptions import PlanError
from ancova_check.models.dgp import DgpSpec
from ancova_check.models.limits import AsymptoticLimits
from ancova_check.models.results import VarianceKind

ASSIGNMENTS = ('iid-bernoulli', 'fixed-margin')
DEFAULT_KINDS = (VarianceKind.MODEL_BASED_PAPER, VarianceKind.SANDWICH_IF_DF)


@dataclass(frozen=True)
class SimPlan:
    """One Monte Carlo study: a DGP, a sample size and a replication budget"""
    dgp: DgpSpec
    n: int
    reps: int
    seed: int
    assignment: str = 'iid-bernoulli'
    estimators: Tuple[VarianceKind, ...] = DEFAULT_KINDS
    level: float = 0.95
    null_value: Optional[float] = None
    name: str = ''
    t_reference: Optional[bool] = None
    dump_replications: bool = False

    def __post_init__(self):
        object.__setattr__(self, 'estimators', tuple(VarianceKind(kind) for kind in self.estimators))
        if self.reps < 1:
            raise PlanError(f"reps must be at least 1; got {self.reps}")
        if self.n < max(self.dgp.k + 3, 4):
            raise PlanError(f"n must be at least max(k + 3, 4) = {max(self.dgp.k + 3, 4)}; got {self.n}")
        if self.assignment not in ASSIGNMENTS:
            raise PlanError(f"assignment must be one of {', '.join(ASSIGNMENTS)}; got {self.assignment!r}")
        if not 0.0 < self.level < 1.0:
            raise PlanError(f"level must lie strictly between 0 and 1; got {self.level}")
        if not self.estimators:
            raise PlanError("at least one estimator is required")
        if self.seed < 0:
            raise PlanError(f"seed must be non-negative; got {self.seed}")

    @property
    def target(self) -> float:
        """Value tested by the Wald tests (Delta unless overridden)"""
        return self.dgp.delta if self.null_value is None else self.null_value

    @property
    def is_size_study(self) -> bool:
        return self.null_value is None or self.null_value == self.dgp.delta

    @property
    def label(self) -> str:
        return self.name or self.dgp.name or 'plan'

    def with_overrides(self, **changes: Any) -> 'SimPlan':
        changes = {key: value for key, value in changes.items() if value is not None}
        return replace(self, **changes) if changes else self

    def to_dict(self) -> Dict[str, Any]:
        return {
            'name': self.name,
            'dgp': self.dgp.to_dict(),
            'n': self.n,
            'reps': self.reps,
            'seed': self.seed,
            'assignment': self.assignment,
            'estimators': [kind.value for kind in self.estimators],
            'level': self.level,
            'null_value': self.null_value,
            't_reference': self.t_reference,
            'dump_replications': self.dump_replications,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any], default_seed: int = 0) -> 'SimPlan':
        if not isinstance(data, dict):
            raise PlanError(f"a plan must be a JSON object; got {data!r}")
        if 'dgp' not in data:
            raise PlanError("plan.dgp: required field is missing")
        dgp = DgpSpec.from_dict(data['dgp'], 'plan.dgp')
        try:
            estimators = tuple(VarianceKind(kind) for kind in data.get('estimators', [k.value for k in DEFAULT_KINDS]))
        except ValueError as exc:
            raise PlanError(f"plan.estimators: {exc}") from None
        for key in ('n', 'reps'):
            if key not in data:
                raise PlanError(f"plan.{key}: required field is missing")
            if isinstance(data[key], bool) or not isinstance(data[key], int):
                raise PlanError(f"plan.{key}: expected an integer, got {data[key]!r}")
        return cls(
            dgp=dgp,
            n=data['n'],
            reps=data['reps'],
            seed=int(data.get('seed', default_seed)),
            assignment=data.get('assignment', 'iid-bernoulli'),
            estimators=estimators,
            level=float(data.get('level', 0.95)),
            null_value=data.get('null_value'),
            name=str(data.get('name', dgp.name)),
            t_reference=None if data.get('t_reference') is None else bool(data['t_reference']),
            dump_replications=bool(data.get('dump_replications', False)),
        )


@dataclass(frozen=True)
class EstimatorSummary:
    """Aggregates over replications for one variance estimator"""
    kind: VarianceKind
    estimand: str
    mean_estimate: float
    emp_n_var: float
    mean_n_var_hat: float
    rejection_rate: float
    coverage: float
    thm1: float
    thm2: float
    predicted_rejection: float
    mc_se: Dict[str, float]
    zero_variance_count: int = 0

    @property
    def target_n_var(self) -> float:
        """Limit of n * estimated variance for this kind"""
        return self.thm2 if self.kind.is_model_based else self.thm1

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data['kind'] = self.kind.value
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'EstimatorSummary':
        return cls(**{**data, 'kind': VarianceKind(data['kind']), 'mc_se': dict(data['mc_se'])})


@dataclass(frozen=True)
class SimReport:
    """Output of one simulation plan"""
    plan: SimPlan
    summaries: Tuple[EstimatorSummary, ...]
    reference: Dict[str, AsymptoticLimits]
    redraws: int = 0
    extrapolation: bool = False
    dump_path: Optional[str] = None

    def summary(self, kind: VarianceKind) -> EstimatorSummary:
        for summary in self.summaries:
            if summary.kind == VarianceKind(kind):
                return summary
        raise KeyError(kind)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'name': self.plan.label,
            'plan': self.plan.to_dict(),
            'redraws': self.redraws,
            'extrapolation': self.extrapolation,
            'reference': {key: limits.to_dict() for key, limits in self.reference.items()},
            'estimators': [summary.to_dict() for summary in self.summaries],
            'dump_path': self.dump_path,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + '\n'

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'SimReport':
        return cls(
            plan=SimPlan.from_dict(data['plan']),
            summaries=tuple(EstimatorSummary.from_dict(item) for item in data['estimators']),
            reference={key: AsymptoticLimits.from_dict(value) for key, value in data['reference'].items()},
            redraws=data.get('redraws', 0),
            extrapolation=data.get('extrapolation', False),
            dump_path=data.get('dump_path'),
        )

    @classmethod
    def from_json(cls, text: str) -> 'SimReport':
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class Verdict:
    """Outcome of comparing one simulated quantity with its theoretical prediction"""
    scenario: str
    kind: str
    check: str
    observed: float
    expected: float
    tolerance: float
    passed: bool
    detail: str = ''

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)
