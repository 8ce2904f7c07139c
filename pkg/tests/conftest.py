import math
import os
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from ancova_check.data import load_csv
from ancova_check.models import DgpSpec, TrialDataset, unit_uniform_laws

ROOT = Path(__file__).resolve().parent.parent
EXAMPLE_CSV = ROOT / 'data' / 'example_trial.csv'
SCENARIO_DIR = ROOT / 'scenarios'

# property suites run 200 examples; `pytest --hypothesis-profile=acceptance` runs 1000
settings.register_profile('fast', max_examples=200, deadline=None)
settings.register_profile('acceptance', max_examples=1000, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.getenv('HYPOTHESIS_PROFILE', 'fast'))


def random_dataset(seed: int, n: int = 40, k: int = 2, pi: float = 0.5, heteroscedastic: bool = True) -> TrialDataset:
    """Random trial with both arms guaranteed at least three members"""
    rng = np.random.default_rng(seed)
    n1 = min(max(3, int(round(n * pi))), n - 3)
    arms = np.zeros(n)
    arms[rng.permutation(n)[:n1]] = 1.0
    covariates = rng.normal(size=(n, k))
    slopes = rng.normal(size=k)
    scale = np.where(arms == 1, 2.0, 0.5) if heteroscedastic else 1.0
    outcomes = 1.0 + 0.7 * arms + covariates @ slopes + scale * rng.normal(size=n)
    return TrialDataset(outcomes, arms, covariates)


@pytest.fixture
def example_path() -> Path:
    return EXAMPLE_CSV


@pytest.fixture
def example_data() -> TrialDataset:
    return load_csv(EXAMPLE_CSV)


@pytest.fixture
def scenario_dir() -> Path:
    return SCENARIO_DIR


def s1_dgp(pi: float = 0.7) -> DgpSpec:
    """k = 1, Var(W) = 1, slopes 2 and 0.5, unit noise"""
    return DgpSpec.linear(pi, unit_uniform_laws(1), (0.0, [2.0]), (0.0, [0.5]), (1.0, 1.0), name='S1')


@pytest.fixture
def s1() -> DgpSpec:
    return s1_dgp()


@pytest.fixture
def s2() -> DgpSpec:
    return DgpSpec.linear(0.7, unit_uniform_laws(1), (0.0, [1.0]), (0.0, [1.0]), (1.0, 1.0), name='S2')


@pytest.fixture
def w0() -> DgpSpec:
    return DgpSpec.linear(0.7, [], (0.0, []), (0.0, []), (1.0, 2.0), name='W0')


S1_THM1 = 1.2025 / 0.7 + 2.1025 / 0.3
S1_THM2 = 1.2025 / 0.3 + 2.1025 / 0.7
SQRT3 = math.sqrt(3.0)
