"""
Profile Selection
Dense Survival Forest Subgroup Profiler

For every cluster count k: spectral clusters, a profile tree fitted to them,
and the leaf heterogeneity test. The profile with the smallest p_leaf below
the threshold p* is selected.
"""

from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from config.settings import settings
from src.clustering.kmeans import ClusterLabels, kmeans
from src.clustering.spectral import embed_from_eigenvectors, normalized_laplacian, symmetric_eig
from src.ensemble.dense import FusedProximity
from src.forest.node import TreeNode
from src.profiling.heterogeneity import (
    DF_LEAVES_MINUS_ONE,
    HeterogeneityTest,
    LeafEffects,
    heterogeneity_test,
    leaf_effects,
)
from src.profiling.profile_tree import ProfileTree, assign_leaves, fit_profile_tree
from src.survival.dataset import SurvivalDataset
from src.utils.errors import ConfigurationError, TooManyClustersError
from src.utils.logger import get_logger

logger = get_logger(__name__)


@dataclass
class KCandidate:
    """Outcome of one cluster count"""
    k: int
    labels: Optional[ClusterLabels]
    tree: Optional[ProfileTree]
    leaf_ids: Optional[np.ndarray]
    test: HeterogeneityTest

    @property
    def p_leaf(self) -> float:
        return self.test.p_leaf

    @property
    def num_leaves(self) -> int:
        return self.test.leaf_count


@dataclass
class ProfileResult:
    """Selected profile with its leaf effects and the evidence behind the choice"""
    tree: ProfileTree
    k: Optional[int]
    num_leaves: int
    p_leaf: float
    metric: float
    leaf_effects: LeafEffects
    heterogeneous: bool
    leaf_ids: np.ndarray
    p_star: float = 0.0
    min_p_leaf: float = 1.0
    candidates: List[KCandidate] = field(default_factory=list)


def selection_metric(p_leaf: float, p_star: float) -> float:
    """p_leaf when p_leaf < p_star, else 0"""
    return float(p_leaf) if p_leaf < p_star else 0.0


def passes_threshold(p_leaf: float, p_star: float) -> bool:
    """Heterogeneity verdict for one candidate; a p_leaf that underflowed to 0 passes"""
    return bool(p_leaf < p_star)


def _similarity(fused: Union[FusedProximity, np.ndarray]) -> np.ndarray:
    return fused.values if isinstance(fused, FusedProximity) else np.asarray(fused, dtype=float)


def check_k_range(k_range: Sequence[int], n: int) -> Tuple[int, int]:
    k_min, k_max = int(k_range[0]), int(k_range[1])
    if not 2 <= k_min <= k_max < n:
        raise ConfigurationError(f"k range must satisfy 2 <= k_min <= k_max < n, got [{k_min}, {k_max}] with n={n}")
    return k_min, k_max


def heterogeneity_scan(dataset: SurvivalDataset, fused: Union[FusedProximity, np.ndarray], k_range: Sequence[int],
                       min_leaf_size: int, seed: int, df_mode: str = DF_LEAVES_MINUS_ONE) -> List[KCandidate]:
    """
    Cluster, profile and test for every k in the range

    The Laplacian is decomposed once; every k reuses the eigenvectors.

    Args:
        dataset: Survival data the proximity was computed on
        fused: Fused proximity
        k_range: (k_min, k_max) inclusive
        min_leaf_size: Minimum rows per profile leaf
        seed: k-means random state
        df_mode: Degrees-of-freedom rule of the heterogeneity test

    Returns:
        One KCandidate per k, in increasing k
    """
    k_min, k_max = check_k_range(k_range, dataset.n)
    similarity = _similarity(fused)
    if similarity.shape != (dataset.n, dataset.n):
        raise ConfigurationError(f"proximity shape {similarity.shape} does not match n={dataset.n}")
    _, vectors = symmetric_eig(normalized_laplacian(similarity))

    candidates = []
    for k in range(k_min, k_max + 1):
        try:
            labels = kmeans(embed_from_eigenvectors(vectors, k), k, seed)
        except TooManyClustersError as e:
            logger.debug(f"k={k}: {str(e)}")
            candidates.append(KCandidate(k, None, None, None, HeterogeneityTest(p_leaf=1.0, diagnostic=str(e))))
            continue

        tree = fit_profile_tree(dataset.covariates, labels, min_leaf_size, schema=dataset.schema)
        leaf_ids = assign_leaves(tree, dataset.covariates)
        test = heterogeneity_test(dataset, leaf_ids, df_mode=df_mode)
        logger.debug(f"k={k}: {test.leaf_count} leaves, p_leaf={test.p_leaf:.4g}")
        candidates.append(KCandidate(k, labels, tree, leaf_ids, test))
    return candidates


def min_p_leaf(candidates: Sequence[KCandidate]) -> float:
    """Calibration statistic: smallest p_leaf over the scanned k"""
    return float(min(candidate.p_leaf for candidate in candidates)) if candidates else 1.0


def single_leaf_tree(dataset: SurvivalDataset, min_leaf_size: int) -> ProfileTree:
    root = TreeNode(terminal_id=0, size=dataset.n)
    return ProfileTree(root=root, min_leaf_size=min_leaf_size, schema=dataset.schema, leaf_classes=(0,))


def choose_candidate(candidates: Sequence[KCandidate], p_star: float) -> Optional[KCandidate]:
    """Smallest p_leaf below p_star, ties to the smaller k"""
    chosen = None
    for candidate in candidates:
        if not passes_threshold(candidate.p_leaf, p_star):
            continue
        if chosen is None or candidate.p_leaf < chosen.p_leaf:
            chosen = candidate
    return chosen


def select_best_profile(dataset: SurvivalDataset, fused: Union[FusedProximity, np.ndarray], k_range: Sequence[int],
                        p_star: float, min_leaf_size: Optional[int] = None, seed: Optional[int] = None,
                        df_mode: str = DF_LEAVES_MINUS_ONE) -> ProfileResult:
    """
    Select the cluster count whose profile shows the strongest heterogeneity

    Args:
        dataset: Survival data
        fused: Fused proximity
        k_range: (k_min, k_max)
        p_star: Calibrated threshold
        min_leaf_size: Minimum profile leaf size (settings default when None)
        seed: k-means random state (settings default when None)
        df_mode: Degrees-of-freedom rule

    Returns:
        ProfileResult; a single-leaf profile with metric 0 when no k qualifies
    """
    if not 0.0 <= p_star <= 1.0:
        raise ConfigurationError(f"p_star must lie in [0, 1], got {p_star}")
    min_leaf_size = settings.DEFAULT_MIN_LEAF_SIZE if min_leaf_size is None else min_leaf_size
    seed = settings.DEFAULT_SEED if seed is None else seed

    candidates = heterogeneity_scan(dataset, fused, k_range, min_leaf_size, seed, df_mode)
    chosen = choose_candidate(candidates, p_star)
    smallest = min_p_leaf(candidates)

    if chosen is None:
        logger.info(f"No heterogeneity declared (min p_leaf {smallest:.4g}, p* {p_star:.4g})")
        leaf_ids = np.zeros(dataset.n, dtype=np.int64)
        return ProfileResult(
            tree=single_leaf_tree(dataset, min_leaf_size),
            k=None,
            num_leaves=1,
            p_leaf=1.0,
            metric=0.0,
            leaf_effects=leaf_effects(dataset, leaf_ids),
            heterogeneous=False,
            leaf_ids=leaf_ids,
            p_star=p_star,
            min_p_leaf=smallest,
            candidates=list(candidates),
        )

    logger.info(
        f"Heterogeneity declared at k={chosen.k}: {chosen.num_leaves} leaves, "
        f"p_leaf {chosen.p_leaf:.4g} < p* {p_star:.4g}"
    )
    return ProfileResult(
        tree=chosen.tree,
        k=chosen.k,
        num_leaves=chosen.num_leaves,
        p_leaf=chosen.p_leaf,
        metric=selection_metric(chosen.p_leaf, p_star),
        leaf_effects=leaf_effects(dataset, chosen.leaf_ids),
        heterogeneous=True,
        leaf_ids=chosen.leaf_ids,
        p_star=p_star,
        min_p_leaf=smallest,
        candidates=list(candidates),
    )
