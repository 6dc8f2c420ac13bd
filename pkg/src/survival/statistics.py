"""
Survival Statistics
Dense Survival Forest Subgroup Profiler

Kaplan-Meier curves, the two-sample log-rank test and likelihood-ratio
testing on top of lifelines and scipy.
"""

from dataclasses import dataclass
from typing import List, Tuple

import numpy as np
from lifelines import KaplanMeierFitter
from lifelines.statistics import logrank_test as _lifelines_logrank
from scipy.stats import chi2

from src.survival.dataset import SurvivalDataset
from src.utils.errors import EmptyDatasetError, NoEventsError


@dataclass
class KaplanMeierCurve:
    """Right-continuous product-limit step function"""
    times: np.ndarray
    survival: np.ndarray

    def at(self, t) -> np.ndarray:
        """Survival probability at time(s) t"""
        idx = np.searchsorted(self.times, np.asarray(t, dtype=float), side='right') - 1
        return np.where(idx >= 0, self.survival[np.maximum(idx, 0)], 1.0)

    def as_pairs(self) -> List[Tuple[float, float]]:
        return [(float(t), float(s)) for t, s in zip(self.times, self.survival)]


def km_estimate(dataset: SurvivalDataset) -> KaplanMeierCurve:
    """
    Kaplan-Meier estimate for a dataset (or subset)

    Args:
        dataset: Survival dataset

    Returns:
        Step function starting at (0, 1.0) with drops at event times only
    """
    if dataset is None or dataset.n == 0:
        raise EmptyDatasetError()
    return _km_from_arrays(dataset.time, dataset.event)


def _km_from_arrays(time: np.ndarray, event: np.ndarray) -> KaplanMeierCurve:
    if time.size == 0:
        raise EmptyDatasetError()
    if not event.any():
        return KaplanMeierCurve(times=np.array([0.0]), survival=np.array([1.0]))

    kmf = KaplanMeierFitter()
    kmf.fit(time, event_observed=event)
    table = kmf.event_table
    event_times = table.index[table['observed'] > 0].to_numpy(dtype=float)
    survival = kmf.survival_function_.iloc[:, 0].loc[event_times].to_numpy(dtype=float)

    if event_times[0] > 0:
        event_times = np.concatenate([[0.0], event_times])
        survival = np.concatenate([[1.0], survival])
    return KaplanMeierCurve(times=event_times, survival=np.clip(survival, 0.0, 1.0))


def logrank_test(group_a: SurvivalDataset, group_b: SurvivalDataset) -> Tuple[float, float]:
    """
    Two-sample log-rank test

    Args:
        group_a: First group
        group_b: Second group

    Returns:
        Tuple of (chi-square statistic, p-value) with one degree of freedom
    """
    if group_a is None or group_b is None or group_a.n == 0 or group_b.n == 0:
        raise EmptyDatasetError()
    return logrank_arrays(group_a.time, group_a.event, group_b.time, group_b.event)


def logrank_arrays(time_a, event_a, time_b, event_b) -> Tuple[float, float]:
    """Log-rank test on raw arrays; see logrank_test"""
    event_a = np.asarray(event_a, dtype=bool)
    event_b = np.asarray(event_b, dtype=bool)
    if event_a.size == 0 or event_b.size == 0:
        raise EmptyDatasetError()
    if not (event_a.any() or event_b.any()):
        raise NoEventsError()

    result = _lifelines_logrank(
        np.asarray(time_a, dtype=float), np.asarray(time_b, dtype=float),
        event_observed_A=event_a, event_observed_B=event_b,
    )
    statistic = max(float(result.test_statistic), 0.0)
    if not np.isfinite(statistic):
        return 0.0, 1.0
    return statistic, chi2_sf(statistic, 1)


def chi2_sf(x: float, df: int) -> float:
    """
    Upper tail of the chi-square distribution

    Args:
        x: Statistic, x >= 0
        df: Degrees of freedom

    Returns:
        P(X > x)
    """
    if x < 0:
        raise ValueError("chi2_sf requires x >= 0")
    if df <= 0:
        raise ValueError("degrees of freedom must be positive")
    return float(min(max(chi2.sf(x, df), 0.0), 1.0))


def likelihood_ratio_test(loglik_null: float, loglik_full: float, df: int) -> float:
    """
    p-value of the likelihood-ratio test of nested models

    Args:
        loglik_null: Maximized log likelihood of the smaller model
        loglik_full: Maximized log likelihood of the larger model
        df: Degrees of freedom

    Returns:
        Chi-square upper tail at 2 (loglik_full - loglik_null)
    """
    if df <= 0:
        raise ValueError("degrees of freedom must be positive")
    if loglik_full < loglik_null - 1e-8:
        raise ValueError(
            f"full-model log likelihood {loglik_full:.6f} below null {loglik_null:.6f}"
        )
    statistic = max(2.0 * (loglik_full - loglik_null), 0.0)
    return chi2_sf(statistic, df)
