"""
K-Means Baseline
Dense Survival Forest Subgroup Profiler

Clusters patients on their covariates alone, picks k by silhouette, and
profiles the clusters the same way as the forest pipeline.
"""

from typing import Optional, Sequence

import numpy as np
from sklearn.preprocessing import StandardScaler

from config.settings import settings
from src.clustering.kmeans import kmeans, silhouette_score
from src.profiling.heterogeneity import DF_LEAVES_MINUS_ONE, heterogeneity_test, leaf_effects
from src.profiling.profile_tree import assign_leaves, fit_profile_tree
from src.profiling.selection import (
    KCandidate,
    ProfileResult,
    check_k_range,
    passes_threshold,
    selection_metric,
)
from src.survival.dataset import SurvivalDataset
from src.utils.errors import SurvProfileError, TooManyClustersError
from src.utils.logger import get_logger

logger = get_logger(__name__)


def encode_covariates(dataset: SurvivalDataset) -> np.ndarray:
    """Categoricals as 0/1 indicators (reference level dropped), every column z-scored"""
    columns = []
    for j, spec in enumerate(dataset.schema):
        column = dataset.covariates[:, j]
        if spec.is_categorical:
            for level in range(1, spec.level_count):
                columns.append((column == level).astype(float))
        else:
            columns.append(column)
    encoded = np.column_stack(columns) if columns else np.zeros((dataset.n, 0))
    return StandardScaler().fit_transform(encoded)


def kmeans_baseline(dataset: SurvivalDataset, k_range: Optional[Sequence[int]] = None, min_leaf_size: Optional[int] = None,
                    seed: Optional[int] = None, p_star: Optional[float] = None,
                    df_mode: str = DF_LEAVES_MINUS_ONE) -> ProfileResult:
    """
    Profile from k-means clusters of the standardized covariates

    Args:
        dataset: Survival data (only its covariates enter the clustering)
        k_range: (k_min, k_max); settings defaults when None
        min_leaf_size: Minimum profile leaf size
        seed: k-means random state
        p_star: Threshold for the verdict; without one, any multi-leaf profile counts
        df_mode: Degrees-of-freedom rule of the heterogeneity test

    Returns:
        ProfileResult for the silhouette-selected k
    """
    k_range = (settings.DEFAULT_K_MIN, settings.DEFAULT_K_MAX) if k_range is None else k_range
    min_leaf_size = settings.DEFAULT_MIN_LEAF_SIZE if min_leaf_size is None else min_leaf_size
    seed = settings.DEFAULT_SEED if seed is None else seed
    k_min, k_max = check_k_range(k_range, dataset.n)

    points = encode_covariates(dataset)
    best_k, best_labels, best_score = None, None, -np.inf
    for k in range(k_min, k_max + 1):
        try:
            labels = kmeans(points, k, seed)
            score = silhouette_score(points, labels)
        except SurvProfileError as e:
            logger.debug(f"Baseline k={k} skipped: {str(e)}")
            continue
        logger.debug(f"Baseline k={k}: silhouette {score:.4f}")
        if score > best_score:
            best_k, best_labels, best_score = k, labels, score

    if best_labels is None:
        raise TooManyClustersError("too many clusters: no k in range could be clustered")

    tree = fit_profile_tree(dataset.covariates, best_labels, min_leaf_size, schema=dataset.schema)
    leaf_ids = assign_leaves(tree, dataset.covariates)
    test = heterogeneity_test(dataset, leaf_ids, df_mode=df_mode)
    threshold = 1.0 if p_star is None else p_star
    metric = selection_metric(test.p_leaf, threshold)
    heterogeneous = test.leaf_count > 1 if p_star is None else passes_threshold(test.p_leaf, threshold)

    return ProfileResult(
        tree=tree,
        k=best_k,
        num_leaves=test.leaf_count,
        p_leaf=test.p_leaf,
        metric=metric,
        leaf_effects=leaf_effects(dataset, leaf_ids),
        heterogeneous=heterogeneous,
        leaf_ids=leaf_ids,
        p_star=threshold,
        min_p_leaf=test.p_leaf,
        candidates=[KCandidate(best_k, best_labels, tree, leaf_ids, test)],
    )
