"""
Survival Data Generator
Dense Survival Forest Subgroup Profiler
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from src.simulation.scenarios import ScenarioSpec, true_region
from src.survival.dataset import SurvivalDataset
from src.utils.integrity import keyed_rng

# Stream keys, one per simulated quantity
_COVARIATES, _TREATMENT, _EVENT_TIME, _ENROLLMENT, _RANDOM_CENSOR = range(5)


@dataclass
class GeneratedDataset:
    """Observed data plus the latent truth behind it"""
    dataset: SurvivalDataset
    event_time: np.ndarray
    censor_time: np.ndarray
    region: np.ndarray
    spec: ScenarioSpec
    seed: int


def weibull_inverse_cdf(u, linear_predictor, shape: float, scale: float) -> np.ndarray:
    """T = scale * (-ln u / exp(lp))^(1/shape)"""
    u = np.asarray(u, dtype=float)
    return scale * (-np.log(u) / np.exp(np.asarray(linear_predictor, dtype=float))) ** (1.0 / shape)


def sample_survival_time(linear_predictor, shape: float, scale: float, rng: np.random.Generator) -> np.ndarray:
    """
    Weibull proportional hazards event times by inversion

    Args:
        linear_predictor: Scalar or array of linear predictors
        shape: Weibull shape
        scale: Weibull scale (time units)
        rng: Random stream

    Returns:
        Positive event times, same shape as linear_predictor
    """
    lp = np.asarray(linear_predictor, dtype=float)
    # 1 - U keeps u inside (0, 1]
    u = 1.0 - rng.random(lp.shape)
    return weibull_inverse_cdf(u, lp, shape, scale)


def balanced_assignment(n: int, rng: np.random.Generator) -> np.ndarray:
    """1:1 allocation in random order; arm sizes differ by at most one"""
    arms = np.arange(n) % 2
    return rng.permutation(arms).astype(np.int8)


def generate_dataset(spec: ScenarioSpec, seed: int, n: Optional[int] = None) -> GeneratedDataset:
    """
    Simulate one trial

    Args:
        spec: Scenario
        seed: Base seed; each quantity draws from its own stream keyed by it
        n: Sample size override

    Returns:
        GeneratedDataset
    """
    n = spec.n if n is None else n

    rng = keyed_rng(seed, _COVARIATES)
    binary = rng.integers(0, 2, size=(n, spec.n_binary)).astype(float)
    normal = rng.standard_normal(size=(n, spec.n_normal))
    covariates = np.hstack([binary, normal])

    treatment = balanced_assignment(n, keyed_rng(seed, _TREATMENT))
    lp = spec.linear_predictor(covariates, treatment)
    event_time = sample_survival_time(lp, spec.shape, spec.scale, keyed_rng(seed, _EVENT_TIME))

    enrollment = keyed_rng(seed, _ENROLLMENT).uniform(0.0, spec.accrual_period, size=n)
    administrative = np.maximum(spec.followup - enrollment, 0.0)
    if spec.random_censor_rate > 0:
        random_censor = keyed_rng(seed, _RANDOM_CENSOR).exponential(1.0 / spec.random_censor_rate, size=n)
    else:
        random_censor = np.full(n, np.inf)
    censor_time = np.minimum(administrative, random_censor)

    event = event_time <= censor_time
    dataset = SurvivalDataset(
        time=np.where(event, event_time, censor_time),
        event=event,
        treatment=treatment,
        covariates=covariates,
        schema=spec.schema,
        ids=np.arange(1, n + 1),
    )
    return GeneratedDataset(
        dataset=dataset,
        event_time=event_time,
        censor_time=censor_time,
        region=true_region(spec, covariates),
        spec=spec,
        seed=seed,
    )
