"""
Spectral Embedding
Dense Survival Forest Subgroup Profiler

Symmetric normalized Laplacian of a similarity matrix and the row-normalized
embedding spanned by its eigenvectors of smallest eigenvalue.
"""

from dataclasses import dataclass
from typing import Tuple

import numpy as np
import scipy.linalg

from src.utils.errors import ConfigurationError

_SYMMETRY_TOL = 1e-10


@dataclass
class Embedding:
    """One row per patient, k columns"""
    points: np.ndarray

    @property
    def k(self) -> int:
        return int(self.points.shape[1])


def _check_symmetric(matrix: np.ndarray):
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {matrix.shape}")
    asymmetry = float(np.max(np.abs(matrix - matrix.T))) if matrix.size else 0.0
    if asymmetry > _SYMMETRY_TOL:
        raise ValueError(f"matrix is not symmetric (max asymmetry {asymmetry:.3g})")


def normalized_laplacian(similarity: np.ndarray) -> np.ndarray:
    """
    L = I - D^{-1/2} S D^{-1/2}

    Args:
        similarity: Symmetric non-negative n x n matrix

    Returns:
        Symmetric n x n Laplacian with eigenvalues in [0, 2]
    """
    s = np.asarray(similarity, dtype=float)
    _check_symmetric(s)
    if np.any(s < 0):
        raise ValueError("similarity has negative entries")
    degree = s.sum(axis=1)
    if np.any(degree <= 0):
        row = int(np.flatnonzero(degree <= 0)[0])
        raise ValueError(f"row {row} has zero degree")

    inv_sqrt = 1.0 / np.sqrt(degree)
    normalized = s * np.outer(inv_sqrt, inv_sqrt)
    # Mirror the upper triangle so the result is exactly symmetric
    normalized = np.triu(normalized) + np.triu(normalized, 1).T
    return np.eye(s.shape[0]) - normalized


def symmetric_eig(matrix: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Ascending eigenvalues and orthonormal eigenvectors (as columns) of a symmetric matrix"""
    a = np.asarray(matrix, dtype=float)
    _check_symmetric(a)
    values, vectors = scipy.linalg.eigh(a)
    return values, vectors


def spectral_embed(similarity: np.ndarray, k: int) -> Embedding:
    """
    Embedding from the k eigenvectors of smallest Laplacian eigenvalue

    Args:
        similarity: Fused proximity (n x n)
        k: Embedding dimension, 2 <= k < n

    Returns:
        Embedding with unit-length rows (all-zero rows stay zero)
    """
    n = np.asarray(similarity).shape[0]
    if not 2 <= k < n:
        raise ConfigurationError(f"embedding dimension must satisfy 2 <= k < n, got k={k}, n={n}")

    _, vectors = symmetric_eig(normalized_laplacian(similarity))
    return embed_from_eigenvectors(vectors, k)


def embed_from_eigenvectors(vectors: np.ndarray, k: int) -> Embedding:
    """Row-normalized leading k eigenvector columns"""
    points = vectors[:, :k].copy()
    norms = np.linalg.norm(points, axis=1)
    nonzero = norms > 0
    points[nonzero] /= norms[nonzero, None]
    return Embedding(points=points)
