"""
Data-generating process specs for simulated two-arm trials.

A DgpSpec describes the joint law of (W, A, Y): independent bounded covariate
coordinates, simple randomisation with P(A=1) = pi, per-arm mean functions from
a fixed catalogue and per-arm noise. Specs round-trip through JSON with the
field names used below.
"""

import json
import math
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import special, stats

from ancova_check.exceptions import DgpSpecError

COVARIATE_LAWS = ('uniform', 'truncated-normal', 'discrete')
MEAN_FORMS = ('linear', 'quadratic', 'interaction', 'exponential-bounded')
NOISE_SHAPES = ('gaussian', 'centered-uniform', 'centered-two-point')
ARMS = ('treated', 'control')


def _number(data: Dict[str, Any], key: str, path: str) -> float:
    if key not in data:
        raise DgpSpecError(f"{path}.{key}", "required field is missing")
    value = data[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise DgpSpecError(f"{path}.{key}", f"expected a number, got {value!r}")
    if not math.isfinite(value):
        raise DgpSpecError(f"{path}.{key}", "must be finite")
    return float(value)


def _vector(data: Dict[str, Any], key: str, path: str, length: Optional[int] = None) -> Tuple[float, ...]:
    if key not in data:
        raise DgpSpecError(f"{path}.{key}", "required field is missing")
    values = data[key]
    if not isinstance(values, list):
        raise DgpSpecError(f"{path}.{key}", f"expected a list, got {values!r}")
    out = []
    for i, value in enumerate(values):
        if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
            raise DgpSpecError(f"{path}.{key}[{i}]", f"expected a finite number, got {value!r}")
        out.append(float(value))
    if length is not None and len(out) != length:
        raise DgpSpecError(f"{path}.{key}", f"expected {length} entries, got {len(out)}")
    return tuple(out)


def _mapping(data: Any, path: str) -> Dict[str, Any]:
    if not isinstance(data, dict):
        raise DgpSpecError(path, f"expected an object, got {data!r}")
    return data


@dataclass(frozen=True)
class CovariateLaw:
    """Law of one bounded covariate coordinate"""
    law: str
    low: float = 0.0
    high: float = 1.0
    mean: float = 0.0
    sd: float = 1.0
    values: Tuple[float, ...] = ()
    probs: Tuple[float, ...] = ()

    @classmethod
    def uniform(cls, low: float, high: float) -> 'CovariateLaw':
        return cls('uniform', low=low, high=high)

    @classmethod
    def truncated_normal(cls, mean: float, sd: float, low: float, high: float) -> 'CovariateLaw':
        return cls('truncated-normal', low=low, high=high, mean=mean, sd=sd)

    @classmethod
    def discrete(cls, values: Sequence[float], probs: Sequence[float]) -> 'CovariateLaw':
        return cls('discrete', values=tuple(values), probs=tuple(probs))

    def _truncnorm(self):
        a = (self.low - self.mean) / self.sd
        b = (self.high - self.mean) / self.sd
        return stats.truncnorm(a, b, loc=self.mean, scale=self.sd)

    def expectation(self) -> float:
        if self.law == 'uniform':
            return 0.5 * (self.low + self.high)
        if self.law == 'discrete':
            return float(np.dot(self.values, self.probs))
        return float(self._truncnorm().mean())

    def variance(self) -> float:
        if self.law == 'uniform':
            return (self.high - self.low) ** 2 / 12.0
        if self.law == 'discrete':
            values = np.asarray(self.values)
            return float(np.dot(self.probs, (values - self.expectation()) ** 2))
        return float(self._truncnorm().var())

    def second_moment(self) -> float:
        return self.variance() + self.expectation() ** 2

    def mgf(self, rate: float) -> float:
        """E[exp(rate * W)]"""
        if rate == 0.0:
            return 1.0
        if self.law == 'uniform':
            return (math.exp(rate * self.high) - math.exp(rate * self.low)) / (rate * (self.high - self.low))
        if self.law == 'discrete':
            return float(np.dot(self.probs, np.exp(rate * np.asarray(self.values))))
        a = (self.low - self.mean) / self.sd
        b = (self.high - self.mean) / self.sd
        shift = self.sd * rate
        mass = special.ndtr(b) - special.ndtr(a)
        return float(
            math.exp(self.mean * rate + 0.5 * shift ** 2)
            * (special.ndtr(b - shift) - special.ndtr(a - shift)) / mass
        )

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        if self.law == 'uniform':
            return rng.uniform(self.low, self.high, size)
        if self.law == 'discrete':
            return rng.choice(np.asarray(self.values), size=size, p=np.asarray(self.probs))
        return self._truncnorm().rvs(size=size, random_state=rng)

    def to_dict(self) -> Dict[str, Any]:
        if self.law == 'uniform':
            return {'law': self.law, 'low': self.low, 'high': self.high}
        if self.law == 'discrete':
            return {'law': self.law, 'values': list(self.values), 'probs': list(self.probs)}
        return {'law': self.law, 'mean': self.mean, 'sd': self.sd, 'low': self.low, 'high': self.high}

    @classmethod
    def from_dict(cls, data: Any, path: str) -> 'CovariateLaw':
        data = _mapping(data, path)
        law = data.get('law')
        if law not in COVARIATE_LAWS:
            raise DgpSpecError(f"{path}.law", f"must be one of {', '.join(COVARIATE_LAWS)}; got {law!r}")
        if law == 'discrete':
            values = _vector(data, 'values', path)
            probs = _vector(data, 'probs', path, len(values))
            if not values:
                raise DgpSpecError(f"{path}.values", "needs at least one support point")
            if min(probs) < 0 or abs(sum(probs) - 1.0) > 1e-12:
                raise DgpSpecError(f"{path}.probs", "must be non-negative and sum to 1")
            return cls.discrete(values, probs)
        if any(isinstance(data.get(key), str) for key in ('low', 'high')):
            raise DgpSpecError(path, "covariate laws must be bounded (finite low and high)")
        low = _number(data, 'low', path)
        high = _number(data, 'high', path)
        if not low < high:
            raise DgpSpecError(f"{path}.high", "must exceed low")
        if law == 'uniform':
            return cls.uniform(low, high)
        sd = _number(data, 'sd', path)
        if sd <= 0:
            raise DgpSpecError(f"{path}.sd", "must be positive")
        return cls.truncated_normal(_number(data, 'mean', path), sd, low, high)


@dataclass(frozen=True)
class MeanFunction:
    """
    Catalogue function of W.

    linear:              c + b'W
    quadratic:           c + b'W + q'(W**2)
    interaction:         c + b'W + strength * W1 * W2
    exponential-bounded: c + b'W + amplitude * exp(rate'W)
    """
    form: str
    intercept: float
    slope: Tuple[float, ...]
    curvature: Tuple[float, ...] = ()
    strength: float = 0.0
    amplitude: float = 0.0
    rate: Tuple[float, ...] = ()

    @classmethod
    def linear(cls, intercept: float, slope: Sequence[float]) -> 'MeanFunction':
        return cls('linear', float(intercept), tuple(float(b) for b in slope))

    @property
    def is_linear(self) -> bool:
        return self.form == 'linear'

    def evaluate(self, covariates: np.ndarray) -> np.ndarray:
        values = self.intercept + covariates @ np.asarray(self.slope, dtype=float)
        if self.form == 'quadratic':
            values = values + (covariates ** 2) @ np.asarray(self.curvature, dtype=float)
        elif self.form == 'interaction':
            values = values + self.strength * covariates[:, 0] * covariates[:, 1]
        elif self.form == 'exponential-bounded':
            values = values + self.amplitude * np.exp(covariates @ np.asarray(self.rate, dtype=float))
        return values

    def expectation(self, laws: Sequence[CovariateLaw]) -> float:
        """E f(W) for independent coordinates"""
        means = np.array([law.expectation() for law in laws])
        value = self.intercept + float(np.dot(self.slope, means)) if laws else self.intercept
        if self.form == 'quadratic':
            value += float(np.dot(self.curvature, [law.second_moment() for law in laws]))
        elif self.form == 'interaction':
            value += self.strength * means[0] * means[1]
        elif self.form == 'exponential-bounded':
            value += self.amplitude * math.prod(law.mgf(r) for law, r in zip(laws, self.rate))
        return float(value)

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {'form': self.form, 'intercept': self.intercept, 'slope': list(self.slope)}
        if self.form == 'quadratic':
            data['curvature'] = list(self.curvature)
        elif self.form == 'interaction':
            data['strength'] = self.strength
        elif self.form == 'exponential-bounded':
            data['amplitude'] = self.amplitude
            data['rate'] = list(self.rate)
        return data

    @classmethod
    def from_dict(cls, data: Any, path: str, k: int) -> 'MeanFunction':
        data = _mapping(data, path)
        form = data.get('form')
        if form not in MEAN_FORMS:
            raise DgpSpecError(f"{path}.form", f"must be one of {', '.join(MEAN_FORMS)}; got {form!r}")
        intercept = _number(data, 'intercept', path)
        slope = _vector(data, 'slope', path, k)
        if form == 'linear':
            return cls(form, intercept, slope)
        if form == 'quadratic':
            return cls(form, intercept, slope, curvature=_vector(data, 'curvature', path, k))
        if form == 'interaction':
            if k < 2:
                raise DgpSpecError(f"{path}.form", "interaction needs at least two covariates")
            return cls(form, intercept, slope, strength=_number(data, 'strength', path))
        return cls(form, intercept, slope, amplitude=_number(data, 'amplitude', path), rate=_vector(data, 'rate', path, k))


@dataclass(frozen=True)
class ArmPair:
    """A value per arm, keyed 'treated' (A=1) and 'control' (A=0)"""
    treated: Any
    control: Any

    def for_arm(self, a: int) -> Any:
        return self.treated if a == 1 else self.control

    def swapped(self) -> 'ArmPair':
        return ArmPair(self.control, self.treated)

    def to_dict(self) -> Dict[str, Any]:
        def encode(value: Any) -> Any:
            return value.to_dict() if hasattr(value, 'to_dict') else value
        return {'treated': encode(self.treated), 'control': encode(self.control)}


def _arm_pair(data: Any, path: str, parse) -> ArmPair:
    data = _mapping(data, path)
    for arm in ARMS:
        if arm not in data:
            raise DgpSpecError(f"{path}.{arm}", "required field is missing")
    return ArmPair(parse(data['treated'], f"{path}.treated"), parse(data['control'], f"{path}.control"))


@dataclass(frozen=True)
class DgpSpec:
    """Joint law of (W, A, Y) for a two-arm trial under simple randomisation"""
    pi: float
    covariate_law: Tuple[CovariateLaw, ...]
    arm_mean: ArmPair
    noise_sd: Optional[ArmPair] = None
    noise_variance: Optional[ArmPair] = None
    noise_shape: str = 'gaussian'
    name: str = ''
    description: str = ''

    def __post_init__(self):
        object.__setattr__(self, 'covariate_law', tuple(self.covariate_law))
        if not 0.0 < self.pi < 1.0:
            raise DgpSpecError('pi', f"must lie strictly between 0 and 1; got {self.pi}")
        if (self.noise_sd is None) == (self.noise_variance is None):
            raise DgpSpecError('noise_sd', "give exactly one of noise_sd or noise_variance")
        if self.noise_sd is not None:
            for arm in ARMS:
                if getattr(self.noise_sd, arm) < 0:
                    raise DgpSpecError(f"noise_sd.{arm}", "must be non-negative")
        if self.noise_shape not in NOISE_SHAPES:
            raise DgpSpecError('noise_shape', f"must be one of {', '.join(NOISE_SHAPES)}; got {self.noise_shape!r}")

    @property
    def k(self) -> int:
        return len(self.covariate_law)

    @property
    def delta(self) -> float:
        """Average treatment effect E m1(W) - E m0(W)"""
        return self.arm_mean.treated.expectation(self.covariate_law) - self.arm_mean.control.expectation(self.covariate_law)

    @property
    def is_analytic(self) -> bool:
        """Linear arm means: closed-form limits apply (noise enters only through its mean variance)"""
        return self.arm_mean.treated.is_linear and self.arm_mean.control.is_linear

    def covariate_mean(self) -> np.ndarray:
        return np.array([law.expectation() for law in self.covariate_law])

    def covariate_cov(self) -> np.ndarray:
        return np.diag([law.variance() for law in self.covariate_law]).reshape(self.k, self.k)

    def sample_covariates(self, rng: np.random.Generator, n: int) -> np.ndarray:
        if not self.covariate_law:
            return np.empty((n, 0))
        return np.column_stack([law.sample(rng, n) for law in self.covariate_law])

    def noise_scale(self, a: int, covariates: np.ndarray) -> np.ndarray:
        """Per-observation noise standard deviation in arm a"""
        if self.noise_sd is not None:
            return np.full(covariates.shape[0], float(self.noise_sd.for_arm(a)))
        variance = self.noise_variance.for_arm(a).evaluate(covariates)
        if (variance < 0).any():
            arm = ARMS[0] if a == 1 else ARMS[1]
            raise DgpSpecError(f"noise_variance.{arm}", f"evaluates to a negative variance ({variance.min():.4g})")
        return np.sqrt(variance)

    def standard_noise(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """Mean-zero, unit-variance noise of the configured shape"""
        if self.noise_shape == 'gaussian':
            return rng.standard_normal(size)
        if self.noise_shape == 'centered-uniform':
            return rng.uniform(-math.sqrt(3.0), math.sqrt(3.0), size)
        return rng.choice(np.array([-1.0, 1.0]), size=size)

    def sample_outcomes(self, rng: np.random.Generator, covariates: np.ndarray, arms: np.ndarray) -> np.ndarray:
        noise = self.standard_noise(rng, covariates.shape[0])
        outcomes = np.empty(covariates.shape[0])
        for a in (1, 0):
            mask = arms == a
            rows = covariates[mask]
            outcomes[mask] = self.arm_mean.for_arm(a).evaluate(rows) + self.noise_scale(a, rows) * noise[mask]
        return outcomes

    def swapped(self) -> 'DgpSpec':
        """Relabel the arms: pi -> 1 - pi, treated <-> control"""
        return DgpSpec(
            pi=1.0 - self.pi,
            covariate_law=self.covariate_law,
            arm_mean=self.arm_mean.swapped(),
            noise_sd=self.noise_sd.swapped() if self.noise_sd else None,
            noise_variance=self.noise_variance.swapped() if self.noise_variance else None,
            noise_shape=self.noise_shape,
            name=f"{self.name}-swapped" if self.name else '',
            description=self.description,
        )

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {}
        if self.name:
            data['name'] = self.name
        if self.description:
            data['description'] = self.description
        data['pi'] = self.pi
        data['covariate_law'] = [law.to_dict() for law in self.covariate_law]
        data['arm_mean'] = self.arm_mean.to_dict()
        if self.noise_sd is not None:
            data['noise_sd'] = self.noise_sd.to_dict()
        else:
            data['noise_variance'] = self.noise_variance.to_dict()
        data['noise_shape'] = self.noise_shape
        return data

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def cache_key(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, data: Any, path: str = 'dgp') -> 'DgpSpec':
        """Create a DgpSpec from a JSON document, reporting the failing field path"""
        data = _mapping(data, path)
        pi = _number(data, "pi", path)
        if not 0.0 < pi < 1.0:
            raise DgpSpecError(f"{path}.pi", f"must lie strictly between 0 and 1; got {pi}")
        laws_data = data.get('covariate_law', [])
        if not isinstance(laws_data, list):
            raise DgpSpecError(f"{path}.covariate_law", "expected a list of per-coordinate laws")
        laws = tuple(CovariateLaw.from_dict(law, f"{path}.covariate_law[{j}]") for j, law in enumerate(laws_data))
        k = len(laws)
        if 'arm_mean' not in data:
            raise DgpSpecError(f"{path}.arm_mean", "required field is missing")
        arm_mean = _arm_pair(data['arm_mean'], f"{path}.arm_mean", lambda d, p: MeanFunction.from_dict(d, p, k))

        noise_sd = noise_variance = None
        if 'noise_sd' in data:
            noise_sd = _arm_pair(data["noise_sd"], f"{path}.noise_sd", _sd)
        if 'noise_variance' in data:
            noise_variance = _arm_pair(data['noise_variance'], f"{path}.noise_variance", lambda d, p: MeanFunction.from_dict(d, p, k))
        if noise_sd is None and noise_variance is None:
            raise DgpSpecError(f"{path}.noise_sd", "required field is missing (or give noise_variance)")
        if noise_sd is not None and noise_variance is not None:
            raise DgpSpecError(f"{path}.noise_variance", "give either noise_sd or noise_variance, not both")

        noise_shape = data.get('noise_shape', 'gaussian')
        if noise_shape not in NOISE_SHAPES:
            raise DgpSpecError(f"{path}.noise_shape", f"must be one of {', '.join(NOISE_SHAPES)}; got {noise_shape!r}")
        return cls(pi, laws, arm_mean, noise_sd, noise_variance, noise_shape,
                   str(data.get("name", "")), str(data.get("description", "")))

    @classmethod
    def from_json(cls, text: str) -> 'DgpSpec':
        return cls.from_dict(json.loads(text))

    @classmethod
    def linear(
        cls,
        pi: float,
        covariate_law: Sequence[CovariateLaw],
        treated: Tuple[float, Sequence[float]],
        control: Tuple[float, Sequence[float]],
        sd: Tuple[float, float],
        noise_shape: str = 'gaussian',
        name: str = '',
    ) -> 'DgpSpec':
        """Linear arm means (intercept, slopes) with constant arm noise"""
        return cls(
            pi=pi,
            covariate_law=tuple(covariate_law),
            arm_mean=ArmPair(MeanFunction.linear(*treated), MeanFunction.linear(*control)),
            noise_sd=ArmPair(float(sd[0]), float(sd[1])),
            noise_shape=noise_shape,
            name=name,
        )


def _sd(value: Any, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise DgpSpecError(path, f"expected a finite number, got {value!r}")
    if value < 0:
        raise DgpSpecError(path, "must be non-negative")
    return float(value)


def unit_uniform_laws(k: int) -> List[CovariateLaw]:
    """k independent uniform coordinates with mean 0 and variance 1"""
    half_width = math.sqrt(3.0)
    return [CovariateLaw.uniform(-half_width, half_width) for _ in range(k)]
