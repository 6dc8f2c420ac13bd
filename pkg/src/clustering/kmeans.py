"""
K-Means Clustering
Dense Survival Forest Subgroup Profiler
"""

from dataclasses import dataclass
from typing import Union

import numpy as np
from sklearn import metrics
from sklearn.cluster import KMeans

from src.clustering.spectral import Embedding, spectral_embed
from src.utils.errors import ConfigurationError, TooManyClustersError

KMEANS_RESTARTS = 10
KMEANS_MAX_ITER = 300


@dataclass
class ClusterLabels:
    """Cluster index in [0, k) per patient"""
    labels: np.ndarray
    k: int

    def sizes(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.k)


def _as_points(points: Union[Embedding, np.ndarray]) -> np.ndarray:
    if isinstance(points, Embedding):
        points = points.points
    points = np.asarray(points, dtype=float)
    if points.ndim == 1:
        points = points.reshape(-1, 1)
    return points


def kmeans(points: Union[Embedding, np.ndarray], k: int, seed: int = 0) -> ClusterLabels:
    """
    k-means++ initialized Lloyd iterations, best of 10 restarts

    Args:
        points: n x d points
        k: Cluster count
        seed: Random state of the restarts

    Returns:
        ClusterLabels
    """
    x = _as_points(points)
    if k < 1:
        raise ConfigurationError("k must be at least 1")
    distinct = np.unique(x, axis=0).shape[0]
    if k > distinct:
        raise TooManyClustersError(f"too many clusters: k={k} exceeds {distinct} distinct points")

    model = KMeans(
        n_clusters=k,
        init="k-means++",
        n_init=KMEANS_RESTARTS,
        max_iter=KMEANS_MAX_ITER,
        random_state=seed,
    )
    labels = model.fit_predict(x)
    return ClusterLabels(labels=labels.astype(np.int64), k=k)


def spectral_cluster(similarity: np.ndarray, k: int, seed: int = 0) -> ClusterLabels:
    """Spectral embedding followed by k-means on its rows"""
    return kmeans(spectral_embed(similarity, k), k, seed)


def silhouette_score(points: Union[Embedding, np.ndarray], labels: Union[ClusterLabels, np.ndarray]) -> float:
    """
    Mean silhouette under Euclidean distance (singleton clusters score 0)

    Args:
        points: n x d points
        labels: Cluster assignment

    Returns:
        Score in [-1, 1]
    """
    x = _as_points(points)
    label_array = labels.labels if isinstance(labels, ClusterLabels) else np.asarray(labels)
    used = np.unique(label_array).size
    if used < 2:
        raise ConfigurationError("silhouette needs at least two clusters")
    if used >= x.shape[0]:
        # Every point is a singleton
        return 0.0
    return float(metrics.silhouette_score(x, label_array, metric="euclidean"))
