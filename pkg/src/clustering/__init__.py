"""
Clustering module
"""
from .spectral import Embedding, normalized_laplacian, symmetric_eig, spectral_embed, embed_from_eigenvectors
from .kmeans import ClusterLabels, kmeans, spectral_cluster, silhouette_score

__all__ = [
    "Embedding",
    "normalized_laplacian",
    "symmetric_eig",
    "spectral_embed",
    "embed_from_eigenvectors",
    "ClusterLabels",
    "kmeans",
    "spectral_cluster",
    "silhouette_score",
]
