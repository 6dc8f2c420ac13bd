"""
Random Survival Forest
Dense Survival Forest Subgroup Profiler
"""

from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from src.forest.config import ForestConfig
from src.forest.node import TreeNode, route, terminal_nodes
from src.forest.tree import grow_tree
from src.survival.dataset import SurvivalDataset
from src.utils.logger import get_logger
from src.utils.parallel import BatchRunner

logger = get_logger(__name__)

# Trees per pool task; amortizes pickling the dataset
_TREES_PER_TASK = 8


@dataclass
class MembershipMatrix:
    """Terminal id of every observation in every tree, plus in-bag multiplicities"""
    terminal: np.ndarray
    inbag: np.ndarray

    @property
    def n(self) -> int:
        return int(self.terminal.shape[0])

    @property
    def ntree(self) -> int:
        return int(self.terminal.shape[1])


def _grow_batch(dataset: SurvivalDataset, config: ForestConfig, tree_indices: List[int]):
    grown = []
    for tree_index in tree_indices:
        root, inbag = grow_tree(dataset, config, tree_index)
        grown.append((root, inbag, route(root, dataset.covariates)))
    return grown


def train_forest(dataset: SurvivalDataset, config: ForestConfig,
                 workers: Optional[int] = 1) -> Tuple[List[TreeNode], MembershipMatrix]:
    """
    Grow config.ntree trees and route every observation down each of them

    Args:
        dataset: Training data
        config: Forest configuration
        workers: Process count (output does not depend on it)

    Returns:
        Tuple of (tree roots, membership matrix)
    """
    config.validate_for(dataset.p)
    indices = list(range(config.ntree))
    batches = [indices[i:i + _TREES_PER_TASK] for i in range(0, len(indices), _TREES_PER_TASK)]
    runner = BatchRunner(max_workers=workers)
    results = runner.map(_grow_batch, [(dataset, config, batch) for batch in batches], desc="Growing trees")

    trees: List[TreeNode] = []
    terminal = np.empty((dataset.n, config.ntree), dtype=np.int32)
    inbag = np.empty((dataset.n, config.ntree), dtype=np.int32)
    column = 0
    for batch in results:
        for root, counts, leaves in batch:
            trees.append(root)
            terminal[:, column] = leaves
            inbag[:, column] = counts
            column += 1

    logger.debug(
        f"Forest grown: {config.ntree} trees, mean terminals "
        f"{np.mean([len(terminal_nodes(t)) for t in trees]):.2f}"
    )
    return trees, MembershipMatrix(terminal=terminal, inbag=inbag)
