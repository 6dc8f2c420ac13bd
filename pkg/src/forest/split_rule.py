"""
Interaction Splitting Rule
Dense Survival Forest Subgroup Profiler

A candidate split labels the node's rows V=0 (left) / V=1 (right) and fits
the Cox model on (V, W, V*W). The split score blends the model's C-index
with the z-score of the V*W coefficient.
"""

from dataclasses import dataclass
from itertools import combinations
from typing import FrozenSet, List, Optional, Tuple, Union

import numpy as np

from config.settings import settings
from src.forest.config import ForestConfig, SplitRuleParams
from src.survival.cox import PartialLikelihood
from src.survival.dataset import SurvivalDataset
from src.utils.errors import NonIdentifiableError, NoEventsError

Cutpoint = Union[float, FrozenSet[int]]


@dataclass(frozen=True)
class SplitCandidate:
    variable: int
    cutpoint: Cutpoint
    score: float

    @property
    def is_categorical(self) -> bool:
        return isinstance(self.cutpoint, frozenset)


def goes_right(column: np.ndarray, cutpoint: Cutpoint) -> np.ndarray:
    """V indicator: True for rows sent to the right child"""
    if isinstance(cutpoint, frozenset):
        return ~np.isin(column, np.fromiter(cutpoint, dtype=float))
    return column > cutpoint


def candidate_cutpoints(values: np.ndarray, nsplit: int, rng: Optional[np.random.Generator] = None) -> np.ndarray:
    """
    Numeric cutpoints for one variable

    nsplit = 0 gives every midpoint between consecutive distinct values.
    Otherwise up to nsplit distinct observed values are drawn uniformly
    (the maximum excluded, it would leave the right child empty).
    """
    distinct = np.unique(values)
    if distinct.size < 2:
        return np.empty(0)
    if nsplit == 0:
        return (distinct[:-1] + distinct[1:]) / 2.0
    pool = distinct[:-1]
    if rng is None or pool.size <= nsplit:
        return pool
    return np.sort(rng.choice(pool, size=nsplit, replace=False))


def categorical_bipartitions(levels) -> List[FrozenSet[int]]:
    """
    Every bipartition of the observed levels, each listed once

    The left set always contains the smallest level, so a partition and its
    mirror image are not both produced.
    """
    levels = sorted(int(v) for v in levels)
    if len(levels) < 2:
        return []
    first, rest = levels[0], levels[1:]
    partitions = []
    for size in range(0, len(rest)):
        for chosen in combinations(rest, size):
            partitions.append(frozenset((first,) + chosen))
    return partitions


def split_statistics(rows: np.ndarray, right: np.ndarray, dataset: SurvivalDataset, nodesize: int = 1,
                     likelihood: Optional[PartialLikelihood] = None) -> Optional[Tuple[float, float]]:
    """
    C-index and interaction z-score of one candidate split, or None when infeasible

    Args:
        rows: Node rows (in-bag, repeats allowed)
        right: V indicator aligned with rows
        dataset: Full dataset
        nodesize: Minimum rows per child
        likelihood: Precomputed partial likelihood for these rows
    """
    right = np.asarray(right, dtype=bool)
    treatment = dataset.treatment[rows]
    event = dataset.event[rows]

    for child in (~right, right):
        if child.sum() < nodesize or not event[child].any():
            return None
        arms = treatment[child]
        if arms.min() == arms.max():
            return None

    v = right.astype(float)
    w = treatment.astype(float)
    design = np.column_stack([v, w, v * w])
    if likelihood is None:
        likelihood = PartialLikelihood(dataset.time[rows], event)
    try:
        fit = likelihood.fit(
            design,
            max_iter=settings.SPLIT_COX_MAX_ITER,
            score_tol=settings.SPLIT_COX_TOL,
            step_tol=settings.SPLIT_COX_TOL,
        )
    except (NonIdentifiableError, NoEventsError):
        return None
    if not fit.converged:
        return None
    interaction_z = float(fit.z_scores[2])
    if not np.isfinite(interaction_z) or not np.isfinite(fit.concordance):
        return None
    return float(fit.concordance), interaction_z


def evaluate_split(node_rows, variable: int, cutpoint: Cutpoint, dataset: SurvivalDataset,
                   params: SplitRuleParams, nodesize: int = 1,
                   likelihood: Optional[PartialLikelihood] = None) -> Optional[float]:
    """
    Split score G(s) of one candidate, or None when infeasible

    Args:
        node_rows: Row indices of the node
        variable: Covariate index
        cutpoint: Numeric threshold or set of left levels
        dataset: Full dataset
        params: Split rule weights
        nodesize: Minimum rows per child

    Returns:
        omega1 * (a1 - 0.5) / 2 + (1 - omega1) * a2 / omega2, or None
    """
    rows = np.asarray(node_rows, dtype=np.intp)
    right = goes_right(dataset.covariates[rows, variable], cutpoint)
    stats = split_statistics(rows, right, dataset, nodesize, likelihood)
    if stats is None:
        return None
    return params.score(*stats)


def sample_variables(p: int, mtry: int, weights: Optional[Tuple[float, ...]], rng: np.random.Generator) -> np.ndarray:
    """mtry distinct covariates, weighted when weights are given; ascending order"""
    if weights is None:
        chosen = rng.choice(p, size=mtry, replace=False)
    else:
        probs = np.asarray(weights, dtype=float)
        available = int(np.count_nonzero(probs))
        chosen = rng.choice(p, size=min(mtry, available), replace=False, p=probs / probs.sum())
    return np.sort(chosen)


def node_candidates(rows: np.ndarray, variable: int, dataset: SurvivalDataset, nsplit: int,
                    rng: np.random.Generator) -> List[Cutpoint]:
    column = dataset.covariates[rows, variable]
    if dataset.schema[variable].is_categorical:
        return categorical_bipartitions(np.unique(column))
    return [float(c) for c in candidate_cutpoints(column, nsplit, rng)]


def best_split(node_rows, dataset: SurvivalDataset, config: ForestConfig,
               rng: np.random.Generator) -> Optional[SplitCandidate]:
    """
    Highest-scoring feasible split of a node

    Variables are visited in ascending index order and cutpoints in
    ascending order; the first maximum wins.

    Args:
        node_rows: In-bag row indices of the node (repeats allowed)
        dataset: Full dataset
        config: Forest configuration
        rng: Tree random stream

    Returns:
        SplitCandidate or None when every candidate is infeasible
    """
    rows = np.asarray(node_rows, dtype=np.intp)
    if rows.size < 2 * config.nodesize:
        return None
    arms = dataset.treatment[rows]
    if arms.min() == arms.max() or dataset.event[rows].sum() < 2:
        return None

    likelihood = PartialLikelihood(dataset.time[rows], dataset.event[rows])
    variables = sample_variables(dataset.p, config.mtry, config.xvar_weights, rng)

    best: Optional[SplitCandidate] = None
    for variable in variables:
        column = dataset.covariates[rows, variable]
        for cutpoint in node_candidates(rows, int(variable), dataset, config.nsplit, rng):
            stats = split_statistics(rows, goes_right(column, cutpoint), dataset, config.nodesize, likelihood)
            if stats is None:
                continue
            score = config.split_params.score(*stats)
            if best is None or score > best.score:
                best = SplitCandidate(int(variable), cutpoint, float(score))
    return best
