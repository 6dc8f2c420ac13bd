"""
Simulation Scenarios
Dense Survival Forest Subgroup Profiler

Weibull proportional hazards scenarios with an optional region x treatment
interaction. Covariates X1-X5 are Bernoulli(0.5), X6-X10 standard normal.
"""

from dataclasses import dataclass, field, asdict
from typing import Dict, Optional, Tuple

import numpy as np

from config.settings import settings
from src.survival.dataset import CATEGORICAL, NUMERIC, CovariateSpec
from src.utils.errors import ConfigurationError

MULTIPLIER_CONSTANT = "constant"
MULTIPLIER_SUM = "sum_of_covariates"

POSITIVE = "positive"
NEGATIVE = "negative"
NEUTRAL = "neutral"

SCENARIO_NAMES = ("scenario1", "scenario2", "scenario3", "scenario4", "global", "null")

_OPERATORS = {
    ">": np.greater,
    ">=": np.greater_equal,
    "<": np.less,
    "<=": np.less_equal,
}


@dataclass(frozen=True)
class RegionCondition:
    """Threshold condition on one covariate (0-based index)"""
    covariate: int
    operator: str
    threshold: float

    def __post_init__(self):
        if self.operator not in _OPERATORS:
            raise ConfigurationError(f"unknown region operator '{self.operator}'")

    def holds(self, covariates: np.ndarray) -> np.ndarray:
        return _OPERATORS[self.operator](covariates[:, self.covariate], self.threshold)


@dataclass(frozen=True)
class KappaTerm:
    """coefficient x I(region) x I(W = arm) x multiplier"""
    conditions: Tuple[RegionCondition, ...]
    arm: int
    coefficient: float
    multiplier: str = MULTIPLIER_CONSTANT

    def __post_init__(self):
        if self.arm not in (0, 1):
            raise ConfigurationError("kappa arm must be 0 or 1")
        if self.multiplier not in (MULTIPLIER_CONSTANT, MULTIPLIER_SUM):
            raise ConfigurationError(f"unknown kappa multiplier '{self.multiplier}'")

    def region(self, covariates: np.ndarray) -> np.ndarray:
        inside = np.ones(covariates.shape[0], dtype=bool)
        for condition in self.conditions:
            inside &= condition.holds(covariates)
        return inside

    def contribution(self, covariates: np.ndarray, treatment: np.ndarray) -> np.ndarray:
        active = self.region(covariates) & (np.asarray(treatment) == self.arm)
        scale = np.ones(covariates.shape[0]) if self.multiplier == MULTIPLIER_CONSTANT else covariates.sum(axis=1)
        return self.coefficient * active * scale

    @property
    def label(self) -> str:
        """positive when treatment lowers the hazard inside the region"""
        treatment_log_hr = self.coefficient if self.arm == 1 else -self.coefficient
        if treatment_log_hr < 0:
            return POSITIVE
        return NEGATIVE if treatment_log_hr > 0 else NEUTRAL


@dataclass(frozen=True)
class ScenarioSpec:
    """Generative model of one simulated trial"""
    name: str = "null"
    n: int = 1000
    shape: float = settings.WEIBULL_SHAPE
    scale: float = settings.WEIBULL_SCALE
    gamma_w: float = 0.0
    gamma: Tuple[float, ...] = (0.0,) * 10
    kappa: Tuple[KappaTerm, ...] = ()
    followup: float = 40 * settings.DAYS_PER_MONTH
    accrual: Optional[float] = None
    random_censor_rate: float = settings.RANDOM_CENSOR_RATE
    n_binary: int = 5
    n_normal: int = 5

    def __post_init__(self):
        if self.n < 1:
            raise ConfigurationError("scenario n must be positive")
        if not (self.shape > 0 and self.scale > 0 and self.followup > 0):
            raise ConfigurationError("shape, scale and followup must be positive")
        if self.random_censor_rate < 0:
            raise ConfigurationError("random censoring rate must be non-negative")
        if len(self.gamma) != self.p:
            raise ConfigurationError(f"gamma has {len(self.gamma)} entries, expected {self.p}")
        for term in self.kappa:
            for condition in term.conditions:
                if not 0 <= condition.covariate < self.p:
                    raise ConfigurationError(f"region references covariate {condition.covariate} outside 0..{self.p - 1}")

    @property
    def p(self) -> int:
        return self.n_binary + self.n_normal

    @property
    def accrual_period(self) -> float:
        return self.followup if self.accrual is None else self.accrual

    @property
    def schema(self) -> Tuple[CovariateSpec, ...]:
        binary = [CovariateSpec(f"X{j + 1}", CATEGORICAL, ("0", "1")) for j in range(self.n_binary)]
        normal = [CovariateSpec(f"X{self.n_binary + j + 1}", NUMERIC) for j in range(self.n_normal)]
        return tuple(binary + normal)

    @property
    def is_heterogeneous(self) -> bool:
        return any(term.coefficient != 0 for term in self.kappa)

    def linear_predictor(self, covariates: np.ndarray, treatment: np.ndarray) -> np.ndarray:
        lp = self.gamma_w * np.asarray(treatment, dtype=float) + covariates @ np.asarray(self.gamma, dtype=float)
        for term in self.kappa:
            lp = lp + term.contribution(covariates, treatment)
        return lp

    def to_dict(self) -> Dict:
        document = asdict(self)
        document["accrual"] = self.accrual_period
        return document


def _quadrant(threshold: float, operator: str = ">") -> Tuple[RegionCondition, ...]:
    # X6 and X7 are columns 5 and 6
    return (RegionCondition(5, operator, threshold), RegionCondition(6, operator, threshold))


def builtin_scenario(name: str, n: int = 1000, multiplier: str = MULTIPLIER_CONSTANT, **overrides) -> ScenarioSpec:
    """
    Named scenario with the ten-covariate design

    Args:
        name: scenario1..scenario4, global or null
        n: Sample size
        multiplier: Kappa multiplier form of the heterogeneous scenarios
        **overrides: ScenarioSpec fields to replace

    Returns:
        ScenarioSpec
    """
    months = settings.DAYS_PER_MONTH
    main_effects = (0.0,) * 5 + (-0.61, -0.61) + (0.0,) * 3
    if name == "scenario1":
        values = dict(gamma=main_effects, kappa=(KappaTerm(_quadrant(0.0), 1, -0.57, multiplier),))
    elif name == "scenario2":
        values = dict(gamma=main_effects, kappa=(KappaTerm(_quadrant(-1.0), 1, -0.57, multiplier),))
    elif name == "scenario3":
        values = dict(kappa=(
            KappaTerm(_quadrant(0.0), 1, -0.44, multiplier),
            # Treated patients in the lower-left quadrant fare worse than controls
            KappaTerm(_quadrant(0.0, "<"), 1, 0.44, multiplier),
        ))
    elif name == "scenario4":
        values = dict(gamma=main_effects, kappa=(KappaTerm(_quadrant(0.0), 1, -0.57, multiplier),),
                      followup=60 * months)
    elif name == "global":
        values = dict(gamma_w=-0.7)
    elif name == "null":
        values = {}
    else:
        raise ConfigurationError(f"unknown scenario '{name}' (choose from {', '.join(SCENARIO_NAMES)})")

    values.update(overrides)
    return ScenarioSpec(name=name, n=n, **values)


def true_region(spec: ScenarioSpec, covariates) -> np.ndarray:
    """
    positive / negative / neutral label per row from the kappa regions

    A row inside several regions takes the label of the first one.
    """
    x = np.atleast_2d(np.asarray(covariates, dtype=float))
    labels = np.full(x.shape[0], NEUTRAL, dtype=object)
    unassigned = np.ones(x.shape[0], dtype=bool)
    for term in spec.kappa:
        if term.coefficient == 0:
            continue
        inside = term.region(x) & unassigned
        labels[inside] = term.label
        unassigned &= ~inside
    return labels
