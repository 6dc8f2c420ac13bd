"""
Pytest Configuration
Dense Survival Forest Subgroup Profiler
"""

import pytest
import sys
from pathlib import Path

import numpy as np

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from config.settings import settings
from src.survival.dataset import CATEGORICAL, NUMERIC, CovariateSpec, SurvivalDataset


def make_dataset(n: int = 120, seed: int = 0, effect: float = 0.0) -> SurvivalDataset:
    """
    Random trial with one binary and two numeric covariates

    `effect` adds a treatment-by-X2 interaction on the log hazard.
    """
    rng = np.random.default_rng(seed)
    binary = rng.integers(0, 2, n).astype(float)
    x2 = rng.normal(size=n)
    x3 = rng.normal(size=n)
    treatment = np.tile([0, 1], n // 2 + 1)[:n]
    lp = 0.3 * x3 + effect * treatment * (x2 > 0)
    event_time = rng.exponential(scale=np.exp(-lp) * 100.0)
    censor_time = rng.uniform(20.0, 300.0, n)
    return SurvivalDataset(
        time=np.minimum(event_time, censor_time),
        event=event_time <= censor_time,
        treatment=treatment,
        covariates=np.column_stack([binary, x2, x3]),
        schema=(
            CovariateSpec("X1", CATEGORICAL, ("0", "1")),
            CovariateSpec("X2", NUMERIC),
            CovariateSpec("X3", NUMERIC),
        ),
        ids=np.arange(1, n + 1),
    )


@pytest.fixture
def small_dataset():
    """Fixture for a 120-row trial"""
    return make_dataset()


@pytest.fixture
def dataset_factory():
    """Fixture returning the dataset builder"""
    return make_dataset


@pytest.fixture(autouse=True)
def quiet_progress(monkeypatch):
    """Progress bars off during tests"""
    monkeypatch.setattr(settings, "SHOW_PROGRESS", False)
