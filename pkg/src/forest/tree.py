"""
Survival Tree Growth
Dense Survival Forest Subgroup Profiler
"""

from typing import Tuple

import numpy as np

from src.forest.config import ForestConfig
from src.forest.node import TreeNode, assign_terminal_ids
from src.forest.split_rule import best_split, goes_right
from src.survival.dataset import SurvivalDataset
from src.utils.integrity import keyed_rng


def bootstrap_counts(n: int, rng: np.random.Generator) -> np.ndarray:
    """In-bag multiplicities of a size-n bootstrap sample (sums to n)"""
    draws = rng.integers(0, n, size=n)
    return np.bincount(draws, minlength=n).astype(np.int32)


def grow_tree(dataset: SurvivalDataset, config: ForestConfig, tree_index: int) -> Tuple[TreeNode, np.ndarray]:
    """
    Grow one tree on a bootstrap sample

    The random stream is keyed by (config.seed, tree_index), so a tree is
    the same no matter which worker grows it or when.

    Args:
        dataset: Training data
        config: Forest configuration
        tree_index: Position of the tree in the forest

    Returns:
        Tuple of (root, in-bag multiplicities per observation)
    """
    rng = keyed_rng(config.seed, tree_index)
    inbag = bootstrap_counts(dataset.n, rng)
    rows = np.repeat(np.arange(dataset.n), inbag)

    root = _grow_node(rows, 0, dataset, config, rng)
    assign_terminal_ids(root)
    return root, inbag


def _grow_node(rows: np.ndarray, depth: int, dataset: SurvivalDataset, config: ForestConfig,
               rng: np.random.Generator) -> TreeNode:
    node = TreeNode(size=int(rows.size), depth=depth)
    if depth >= config.nodedepth:
        return node

    split = best_split(rows, dataset, config, rng)
    if split is None:
        return node

    right = goes_right(dataset.covariates[rows, split.variable], split.cutpoint)
    node.variable = split.variable
    node.score = split.score
    if split.is_categorical:
        node.left_levels = split.cutpoint
    else:
        node.threshold = split.cutpoint
    node.left = _grow_node(rows[~right], depth + 1, dataset, config, rng)
    node.right = _grow_node(rows[right], depth + 1, dataset, config, rng)
    return node
