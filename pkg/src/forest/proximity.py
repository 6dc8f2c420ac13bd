"""
Forest Proximity
Dense Survival Forest Subgroup Profiler

Proximity of two observations is the fraction of trees in which they land
in the same terminal node, every observation routed down every tree.
"""

from dataclasses import dataclass

import numpy as np
from scipy import sparse

from src.forest.forest import MembershipMatrix
from src.utils.errors import ConfigurationError

_TREES_PER_CHUNK = 256


@dataclass
class ProximityMatrix:
    """Symmetric n x n proximity with unit diagonal, entries in [0, 1]"""
    values: np.ndarray
    tree_count: int

    @property
    def n(self) -> int:
        return int(self.values.shape[0])

    def check(self):
        """Raise ValueError when an invariant is violated"""
        v = self.values
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise ValueError(f"proximity must be square, got shape {v.shape}")
        if not np.array_equal(v, v.T):
            raise ValueError("proximity is not symmetric")
        if not np.all(np.diag(v) == 1.0):
            raise ValueError("proximity diagonal is not 1")
        if v.min() < 0.0 or v.max() > 1.0:
            raise ValueError("proximity entries outside [0, 1]")


def cooccurrence_counts(terminal: np.ndarray) -> np.ndarray:
    """
    Number of trees in which each pair of rows shares a terminal node

    Args:
        terminal: n x ntree matrix of terminal ids

    Returns:
        n x n int64 matrix; the diagonal equals ntree
    """
    terminal = np.asarray(terminal, dtype=np.int64)
    n, ntree = terminal.shape
    counts = np.zeros((n, n), dtype=np.int64)

    for start in range(0, ntree, _TREES_PER_CHUNK):
        block = terminal[:, start:start + _TREES_PER_CHUNK]
        width = block.shape[1]
        # Leaf ids of each tree shifted into their own column range
        offsets = np.concatenate([[0], np.cumsum(block.max(axis=0) + 1)[:-1]])
        columns = (block + offsets).ravel()
        indicator = sparse.csr_matrix(
            (np.ones(n * width, dtype=np.int64), (np.repeat(np.arange(n), width), columns)),
            shape=(n, int(columns.max()) + 1),
        )
        counts += (indicator @ indicator.T).toarray()
    return counts


def proximity_from_counts(counts: np.ndarray, tree_count: int) -> ProximityMatrix:
    if tree_count < 1:
        raise ConfigurationError("proximity needs at least one tree")
    values = counts.astype(float) / float(tree_count)
    np.fill_diagonal(values, 1.0)
    return ProximityMatrix(values=values, tree_count=int(tree_count))


def proximity_from_membership(membership: MembershipMatrix) -> ProximityMatrix:
    """
    Breiman proximity of a single forest

    Args:
        membership: Terminal ids of every row in every tree

    Returns:
        ProximityMatrix over membership.ntree trees
    """
    return proximity_from_counts(cooccurrence_counts(membership.terminal), membership.ntree)
