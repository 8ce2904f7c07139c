"""
Trial data model: one row per randomised participant
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Tuple

import numpy as np

from ancova_check.exceptions import DegenerateDesignError, TrialDataError


def _frozen(values: Any, ndim: int) -> np.ndarray:
    array = np.array(values, dtype=float, ndmin=ndim, copy=True)
    array.flags.writeable = False
    return array


@dataclass(frozen=True, eq=False)
class TrialDataset:
    """Outcomes Y, arm indicators A (1 = experimental) and baseline covariates W"""
    outcomes: np.ndarray
    arms: np.ndarray
    covariates: np.ndarray
    covariate_names: Tuple[str, ...] = ()

    def __post_init__(self):
        outcomes = _frozen(self.outcomes, 1).ravel()
        arms = _frozen(self.arms, 1).ravel()
        n = outcomes.shape[0]
        covariates = np.array(self.covariates, dtype=float, copy=True)
        if covariates.size == 0:
            covariates = np.empty((n, 0))
        covariates = covariates.reshape(n, -1) if covariates.ndim != 2 else covariates
        covariates.flags.writeable = False
        names = tuple(self.covariate_names) or tuple(f"W{j + 1}" for j in range(covariates.shape[1]))

        if arms.shape[0] != n or covariates.shape[0] != n:
            raise TrialDataError(
                f"length mismatch: {n} outcomes, {arms.shape[0]} arm indicators, "
                f"{covariates.shape[0]} covariate rows"
            )
        if len(names) != covariates.shape[1]:
            raise TrialDataError(f"{len(names)} covariate names for {covariates.shape[1]} covariate columns")
        if not np.isin(arms, (0.0, 1.0)).all():
            row = int(np.flatnonzero(~np.isin(arms, (0.0, 1.0)))[0]) + 1
            raise TrialDataError("arm indicator not in {0,1}", row=row, column="A")
        for label, values in (("Y", outcomes), ("A", arms)):
            if not np.isfinite(values).all():
                raise TrialDataError("non-finite value", row=int(np.flatnonzero(~np.isfinite(values))[0]) + 1, column=label)
        if not np.isfinite(covariates).all():
            row, col = np.argwhere(~np.isfinite(covariates))[0]
            raise TrialDataError("non-finite value", row=int(row) + 1, column=names[col])
        if arms.sum() == 0 or arms.sum() == n:
            raise TrialDataError("arms must contain at least one 0 and at least one 1", column="A")

        object.__setattr__(self, 'outcomes', outcomes)
        object.__setattr__(self, 'arms', arms)
        object.__setattr__(self, 'covariates', covariates)
        object.__setattr__(self, 'covariate_names', names)

    @property
    def n(self) -> int:
        return int(self.outcomes.shape[0])

    @property
    def k(self) -> int:
        return int(self.covariates.shape[1])

    @property
    def pi_hat(self) -> float:
        """Sample proportion randomised to the experimental arm"""
        return float(self.arms.mean())

    def arm_sizes(self) -> Tuple[int, int]:
        """(n1, n0): treated and control counts"""
        n1 = int(self.arms.sum())
        return n1, self.n - n1

    def arm(self, a: int) -> np.ndarray:
        """Outcomes of arm a"""
        return self.outcomes[self.arms == a]

    def require_fit_size(self) -> None:
        if self.n < self.k + 3:
            raise DegenerateDesignError(
                f"ANCOVA needs n >= k + 3 observations; got n={self.n}, k={self.k}"
            )

    def with_covariates(self, covariates: np.ndarray, names: Tuple[str, ...] = ()) -> 'TrialDataset':
        return TrialDataset(self.outcomes, self.arms, covariates, names)

    def without_covariates(self) -> 'TrialDataset':
        """The same trial with W dropped (the unadjusted design)"""
        return TrialDataset(self.outcomes, self.arms, np.empty((self.n, 0)), ())

    def permuted(self, order: np.ndarray) -> 'TrialDataset':
        order = np.asarray(order)
        return TrialDataset(self.outcomes[order], self.arms[order], self.covariates[order], self.covariate_names)

    def to_dict(self) -> Dict[str, Any]:
        """Convert dataset to dictionary for serialization"""
        return {
            'outcomes': self.outcomes.tolist(),
            'arms': [int(a) for a in self.arms],
            'covariates': self.covariates.tolist(),
            'covariate_names': list(self.covariate_names),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'TrialDataset':
        """Create TrialDataset instance from dictionary"""
        n = len(data['outcomes'])
        covariates = np.array(data.get('covariates') or np.empty((n, 0)), dtype=float).reshape(n, -1)
        return cls(data['outcomes'], data['arms'], covariates, tuple(data.get('covariate_names', ())))

    def equals(self, other: 'TrialDataset') -> bool:
        """Exact (bitwise) equality of all fields"""
        return (
            self.covariate_names == other.covariate_names
            and np.array_equal(self.outcomes, other.outcomes)
            and np.array_equal(self.arms, other.arms)
            and np.array_equal(self.covariates, other.covariates)
        )


@dataclass(frozen=True, eq=False)
class DesignMatrix:
    """ANCOVA design with columns [intercept, A, W1..Wk]"""
    values: np.ndarray
    column_labels: Tuple[str, ...] = field(default=())

    def __post_init__(self):
        values = np.array(self.values, dtype=float, copy=True)
        values.flags.writeable = False
        object.__setattr__(self, 'values', values)
        object.__setattr__(self, 'column_labels', tuple(self.column_labels))

    @property
    def shape(self) -> Tuple[int, int]:
        return self.values.shape

    def to_dict(self) -> Dict[str, Any]:
        return {'values': self.values.tolist(), 'column_labels': list(self.column_labels)}

    def column(self, label: str) -> np.ndarray:
        return self.values[:, self.column_labels.index(label)]

    def labels(self) -> List[str]:
        return list(self.column_labels)
