"""
Treatment Effect Heterogeneity Across Leaves
Dense Survival Forest Subgroup Profiler
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from src.survival.cox import cox_fit
from src.survival.dataset import SurvivalDataset
from src.survival.statistics import likelihood_ratio_test, logrank_arrays
from src.utils.errors import NoEventsError, NonIdentifiableError, ConfigurationError
from src.utils.logger import get_logger

logger = get_logger(__name__)

DF_LEAVES_MINUS_ONE = "leaves_minus_one"
DF_TWICE_LEAVES_MINUS_ONE = "two_times_leaves_minus_one"
DF_MODES = (DF_LEAVES_MINUS_ONE, DF_TWICE_LEAVES_MINUS_ONE)


@dataclass
class HeterogeneityTest:
    """Likelihood-ratio test of leaf x treatment interaction"""
    p_leaf: float
    statistic: float = 0.0
    df: int = 0
    leaf_count: int = 1
    diagnostic: str = ""

    @property
    def failed(self) -> bool:
        return bool(self.diagnostic)


@dataclass
class LeafEffect:
    leaf_id: int
    n_control: int
    n_treated: int
    events_control: int
    events_treated: int
    hazard_ratio: Optional[float]
    logrank_p: float
    flags: Tuple[str, ...] = ()

    @property
    def size(self) -> int:
        return self.n_control + self.n_treated


@dataclass
class LeafEffects:
    """Per-leaf arm sizes, hazard ratio of treatment and log-rank p"""
    effects: List[LeafEffect] = field(default_factory=list)

    def __iter__(self):
        return iter(self.effects)

    def __len__(self) -> int:
        return len(self.effects)

    def by_leaf(self) -> Dict[int, LeafEffect]:
        return {effect.leaf_id: effect for effect in self.effects}


def leaf_design(treatment: np.ndarray, leaf_ids: np.ndarray) -> Tuple[np.ndarray, np.ndarray, int]:
    """
    Designs of the treatment-only and the leaf-interaction models

    Leaves are dummy coded against the lowest leaf id.

    Returns:
        Tuple of (null design [W], full design [W, dummies, W x dummies], leaf count)
    """
    w = np.asarray(treatment, dtype=float)
    levels, codes = np.unique(np.asarray(leaf_ids), return_inverse=True)
    dummies = (codes[:, None] == np.arange(1, levels.size)[None, :]).astype(float)
    null_design = w[:, None]
    full_design = np.column_stack([w, dummies, dummies * w[:, None]])
    return null_design, full_design, int(levels.size)


def heterogeneity_test(dataset: SurvivalDataset, leaf_ids, df_mode: str = DF_LEAVES_MINUS_ONE) -> HeterogeneityTest:
    """
    p_leaf for the leaf x treatment interaction

    Fits the Cox model on treatment alone and on treatment, leaf dummies and
    their products with treatment, and compares them by likelihood ratio.

    Args:
        dataset: Survival data
        leaf_ids: Leaf per row
        df_mode: leaves_minus_one (default) or two_times_leaves_minus_one

    Returns:
        HeterogeneityTest; p_leaf = 1 with a diagnostic when a fit fails,
        and p_leaf = 1 when there is a single leaf
    """
    if df_mode not in DF_MODES:
        raise ConfigurationError(f"unknown df_mode '{df_mode}'")
    leaf_ids = np.asarray(leaf_ids)
    if leaf_ids.shape[0] != dataset.n:
        raise ValueError("leaf ids must align with the dataset rows")

    null_design, full_design, leaf_count = leaf_design(dataset.treatment, leaf_ids)
    if leaf_count == 1:
        return HeterogeneityTest(p_leaf=1.0, leaf_count=1)

    df = leaf_count - 1 if df_mode == DF_LEAVES_MINUS_ONE else 2 * (leaf_count - 1)
    try:
        null_fit = cox_fit(dataset.time, dataset.event, null_design, with_concordance=False)
        full_fit = cox_fit(dataset.time, dataset.event, full_design, with_concordance=False)
    except (NonIdentifiableError, NoEventsError) as e:
        logger.debug(f"Heterogeneity test failed over {leaf_count} leaves: {str(e)}")
        return HeterogeneityTest(p_leaf=1.0, df=df, leaf_count=leaf_count, diagnostic=str(e))

    if not (null_fit.converged and full_fit.converged):
        diagnostic = full_fit.diagnostic or null_fit.diagnostic or "no convergence"
        logger.debug(f"Heterogeneity test did not converge over {leaf_count} leaves: {diagnostic}")
        return HeterogeneityTest(p_leaf=1.0, df=df, leaf_count=leaf_count, diagnostic=diagnostic)

    statistic = max(2.0 * (full_fit.loglik_at_estimate - null_fit.loglik_at_estimate), 0.0)
    p_leaf = likelihood_ratio_test(null_fit.loglik_at_estimate,
                                   max(full_fit.loglik_at_estimate, null_fit.loglik_at_estimate), df)
    return HeterogeneityTest(p_leaf=p_leaf, statistic=statistic, df=df, leaf_count=leaf_count)


def _leaf_effect(leaf_id: int, time: np.ndarray, event: np.ndarray, treatment: np.ndarray) -> LeafEffect:
    treated = treatment == 1
    n_treated = int(treated.sum())
    n_control = int(treated.size - n_treated)
    flags: List[str] = []
    hazard_ratio: Optional[float] = None
    logrank_p = 1.0

    if n_treated == 0 or n_control == 0:
        flags.append("single arm")
    elif not event.any():
        flags.append("no events")
    else:
        try:
            fit = cox_fit(time, event, treated.astype(float)[:, None], with_concordance=False)
            if fit.converged:
                hazard_ratio = float(np.exp(fit.coefficients[0]))
            else:
                flags.append(fit.diagnostic)
        except (NonIdentifiableError, NoEventsError) as e:
            flags.append(str(e))
        _, logrank_p = logrank_arrays(time[treated], event[treated], time[~treated], event[~treated])

    return LeafEffect(
        leaf_id=int(leaf_id),
        n_control=n_control,
        n_treated=n_treated,
        events_control=int(event[~treated].sum()),
        events_treated=int(event[treated].sum()),
        hazard_ratio=hazard_ratio,
        logrank_p=float(logrank_p),
        flags=tuple(flags),
    )


def leaf_effects(dataset: SurvivalDataset, leaf_ids) -> LeafEffects:
    """
    Treatment hazard ratio and log-rank p within every leaf

    Args:
        dataset: Survival data
        leaf_ids: Leaf per row

    Returns:
        LeafEffects ordered by leaf id; undefined hazard ratios are None with a flag
    """
    leaf_ids = np.asarray(leaf_ids)
    effects = []
    for leaf_id in np.unique(leaf_ids):
        rows = leaf_ids == leaf_id
        effects.append(_leaf_effect(int(leaf_id), dataset.time[rows], dataset.event[rows], dataset.treatment[rows]))
    return LeafEffects(effects=effects)
