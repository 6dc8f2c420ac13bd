"""
Simulation module
"""
from .scenarios import (
    ScenarioSpec,
    KappaTerm,
    RegionCondition,
    builtin_scenario,
    true_region,
    SCENARIO_NAMES,
    POSITIVE,
    NEGATIVE,
    NEUTRAL,
)
from .generator import GeneratedDataset, generate_dataset, sample_survival_time, weibull_inverse_cdf

__all__ = [
    "ScenarioSpec",
    "KappaTerm",
    "RegionCondition",
    "builtin_scenario",
    "true_region",
    "SCENARIO_NAMES",
    "POSITIVE",
    "NEGATIVE",
    "NEUTRAL",
    "GeneratedDataset",
    "generate_dataset",
    "sample_survival_time",
    "weibull_inverse_cdf",
]
