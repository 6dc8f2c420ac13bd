"""
Profile Tree
Dense Survival Forest Subgroup Profiler

Greedy Gini-impurity classification tree that explains cluster labels in
terms of baseline covariates. Its terminal nodes ("leaves") are the
candidate subgroups.
"""

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from src.forest.node import TreeNode, assign_terminal_ids, iter_nodes, route, split_variables
from src.forest.split_rule import categorical_bipartitions
from src.survival.dataset import CovariateSpec, NUMERIC
from src.utils.errors import ConfigurationError, DatasetValidationError

_MIN_IMPURITY_DECREASE = 1e-12


@dataclass
class ProfileTree:
    """Decision tree over covariates whose terminals are leaves 0..L-1"""
    root: TreeNode
    min_leaf_size: int
    schema: Tuple[CovariateSpec, ...]
    leaf_classes: Tuple[int, ...] = ()

    @property
    def leaf_count(self) -> int:
        return sum(1 for node in iter_nodes(self.root) if node.is_terminal)

    @property
    def split_variables(self) -> List[int]:
        return sorted(split_variables(self.root))

    def predict(self, covariates) -> np.ndarray:
        """Majority cluster label of each row's leaf"""
        return np.asarray(self.leaf_classes, dtype=np.int64)[assign_leaves(self, covariates)]


def _gini(counts: np.ndarray) -> np.ndarray:
    """Gini impurity of class-count rows"""
    totals = counts.sum(axis=-1, keepdims=True)
    with np.errstate(divide='ignore', invalid='ignore'):
        shares = np.where(totals > 0, counts / totals, 0.0)
    return 1.0 - np.sum(shares ** 2, axis=-1)


def _numeric_split(column: np.ndarray, onehot: np.ndarray, min_leaf_size: int) -> Optional[Tuple[float, float]]:
    """(weighted child impurity, threshold) of the best midpoint split, or None"""
    n = column.size
    order = np.argsort(column, kind="mergesort")
    x = column[order]
    left_counts = np.cumsum(onehot[order], axis=0)[:-1]
    right_counts = left_counts[-1] + onehot[order][-1] - left_counts

    left_sizes = np.arange(1, n)
    valid = (x[:-1] < x[1:]) & (left_sizes >= min_leaf_size) & (n - left_sizes >= min_leaf_size)
    if not valid.any():
        return None

    weighted = (left_sizes * _gini(left_counts) + (n - left_sizes) * _gini(right_counts)) / n
    weighted = np.where(valid, weighted, np.inf)
    best = int(np.argmin(weighted))
    return float(weighted[best]), float((x[best] + x[best + 1]) / 2.0)


def _categorical_split(column: np.ndarray, onehot: np.ndarray,
                       min_leaf_size: int) -> Optional[Tuple[float, frozenset]]:
    n = column.size
    best = None
    for left_levels in categorical_bipartitions(np.unique(column)):
        left = np.isin(column, np.fromiter(left_levels, dtype=float))
        n_left = int(left.sum())
        if n_left < min_leaf_size or n - n_left < min_leaf_size:
            continue
        counts = np.vstack([onehot[left].sum(axis=0), onehot[~left].sum(axis=0)])
        weighted = float((n_left * _gini(counts[0]) + (n - n_left) * _gini(counts[1])) / n)
        if best is None or weighted < best[0]:
            best = (weighted, left_levels)
    return best


def _grow(rows: np.ndarray, depth: int, covariates: np.ndarray, onehot: np.ndarray,
          schema: Sequence[CovariateSpec], min_leaf_size: int, max_depth: Optional[int],
          leaf_classes: List[int]) -> TreeNode:
    counts = onehot[rows].sum(axis=0)
    node = TreeNode(size=int(rows.size), depth=depth)
    impurity = float(_gini(counts))

    can_split = (rows.size >= 2 * min_leaf_size and impurity > 0.0
                 and (max_depth is None or depth < max_depth))
    best = None
    if can_split:
        for variable, spec in enumerate(schema):
            column = covariates[rows, variable]
            if spec.is_categorical:
                found = _categorical_split(column, onehot[rows], min_leaf_size)
            else:
                found = _numeric_split(column, onehot[rows], min_leaf_size)
            if found is not None and impurity - found[0] > _MIN_IMPURITY_DECREASE:
                if best is None or found[0] < best[0]:
                    best = (found[0], variable, found[1])

    if best is None:
        leaf_classes.append(int(np.argmax(counts)))
        return node

    _, variable, cutpoint = best
    node.variable = variable
    if isinstance(cutpoint, frozenset):
        node.left_levels = cutpoint
    else:
        node.threshold = cutpoint
    left = node.goes_left(covariates[rows, variable])
    node.left = _grow(rows[left], depth + 1, covariates, onehot, schema, min_leaf_size, max_depth, leaf_classes)
    node.right = _grow(rows[~left], depth + 1, covariates, onehot, schema, min_leaf_size, max_depth, leaf_classes)
    return node


def fit_profile_tree(covariates, labels, min_leaf_size: int,
                     schema: Optional[Sequence[CovariateSpec]] = None,
                     max_depth: Optional[int] = None) -> ProfileTree:
    """
    Fit a classification tree to cluster labels

    Args:
        covariates: n x p matrix (categoricals as level indices)
        labels: Cluster label per row (ClusterLabels or integer array)
        min_leaf_size: Minimum rows per leaf
        schema: Covariate kinds; all numeric when None
        max_depth: Optional depth cap

    Returns:
        ProfileTree (a single leaf when no feasible impurity-reducing split exists)
    """
    x = np.asarray(covariates, dtype=float)
    y = np.asarray(getattr(labels, "labels", labels), dtype=np.int64)
    if x.ndim != 2 or x.shape[0] != y.size:
        raise ValueError("covariates and labels disagree on the number of rows")
    if min_leaf_size < 1:
        raise ConfigurationError("min_leaf_size must be positive")
    if schema is None:
        schema = tuple(CovariateSpec(f"x{j + 1}", NUMERIC) for j in range(x.shape[1]))
    schema = tuple(schema)

    _, codes = np.unique(y, return_inverse=True)
    classes = np.unique(y)
    onehot = np.eye(classes.size, dtype=float)[codes]

    leaf_classes: List[int] = []
    root = _grow(np.arange(x.shape[0]), 0, x, onehot, schema, min_leaf_size, max_depth, leaf_classes)
    assign_terminal_ids(root)
    return ProfileTree(
        root=root,
        min_leaf_size=min_leaf_size,
        schema=schema,
        leaf_classes=tuple(int(classes[c]) for c in leaf_classes),
    )


def assign_leaves(tree: ProfileTree, covariates) -> np.ndarray:
    """
    Leaf id of every row

    Raises:
        DatasetValidationError: Wrong width, missing value, or unknown categorical level
    """
    x = np.asarray(covariates, dtype=float)
    if x.ndim == 1:
        x = x.reshape(1, -1)
    if x.shape[1] != len(tree.schema):
        raise DatasetValidationError([f"expected {len(tree.schema)} covariates, got {x.shape[1]}"])
    for j, spec in enumerate(tree.schema):
        column = x[:, j]
        bad = ~np.isfinite(column)
        if spec.is_categorical:
            bad |= (column < 0) | (column >= spec.level_count) | (column != np.floor(column))
        if np.any(bad):
            row = int(np.flatnonzero(bad)[0])
            raise DatasetValidationError([f"row {row}: {spec.name} outside the covariate schema"],
                                         row=row, column=spec.name)
    return route(tree.root, x).astype(np.int64)
