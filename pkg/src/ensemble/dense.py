"""
Dense Forest Training
Dense Survival Forest Subgroup Profiler

Trains one forest per grid configuration and pools their terminal-node
co-occurrence counts into a single similarity matrix.
"""

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from src.ensemble.grid import ParamGrid, expand_grid
from src.forest.config import ForestConfig
from src.forest.forest import train_forest
from src.forest.proximity import ProximityMatrix, cooccurrence_counts
from src.survival.dataset import SurvivalDataset
from src.utils.errors import ConfigurationError
from src.utils.logger import get_logger
from src.utils.parallel import BatchRunner

logger = get_logger(__name__)


@dataclass
class FusedProximity:
    """Proximity over the pooled trees of every configuration"""
    values: np.ndarray
    total_trees: int
    config_count: int

    @property
    def n(self) -> int:
        return int(self.values.shape[0])

    def as_proximity(self) -> ProximityMatrix:
        return ProximityMatrix(values=self.values, tree_count=self.total_trees)


def fuse_proximity(parts: Sequence[Tuple[ProximityMatrix, int]]) -> FusedProximity:
    """
    Tree-count weighted mean of per-configuration proximities

    Args:
        parts: (proximity, tree count) pairs

    Returns:
        FusedProximity equal to the single-forest proximity of the pooled trees
    """
    if not parts:
        raise ConfigurationError("nothing to fuse")
    n = parts[0][0].n
    total = 0
    weighted = np.zeros((n, n), dtype=float)
    for proximity, tree_count in parts:
        if proximity.n != n:
            raise ConfigurationError(f"cannot fuse proximities of sizes {n} and {proximity.n}")
        weighted += float(tree_count) * proximity.values
        total += int(tree_count)

    values = np.clip(weighted / float(total), 0.0, 1.0)
    np.fill_diagonal(values, 1.0)
    return FusedProximity(values=values, total_trees=total, config_count=len(parts))


def _train_configs(dataset: SurvivalDataset, configs: List[ForestConfig]) -> np.ndarray:
    counts = np.zeros((dataset.n, dataset.n), dtype=np.int64)
    for config in configs:
        _, membership = train_forest(dataset, config, workers=1)
        counts += cooccurrence_counts(membership.terminal)
    return counts


def dense_train(dataset: SurvivalDataset, grid: ParamGrid, workers: Optional[int] = None) -> FusedProximity:
    """
    Train a forest per grid configuration and fuse the memberships

    Integer co-occurrence counts are summed before the single division, so
    the result does not depend on how configurations are spread over workers.

    Args:
        dataset: Training data
        grid: Hyperparameter grid
        workers: Process count (settings.MAX_WORKERS when None)

    Returns:
        FusedProximity
    """
    configs = expand_grid(grid)
    for config in configs:
        config.validate_for(dataset.p)

    runner = BatchRunner(max_workers=workers)
    task_count = min(len(configs), max(1, runner.max_workers * 4))
    groups = [configs[i::task_count] for i in range(task_count)]
    logger.info(
        f"Dense training: {len(configs)} configurations x {grid.ntree} trees on n={dataset.n}"
    )
    partial_counts = runner.map(_train_configs, [(dataset, group) for group in groups], desc="Training forests")

    counts = np.zeros((dataset.n, dataset.n), dtype=np.int64)
    for part in partial_counts:
        counts += part

    total_trees = grid.ntree * len(configs)
    values = counts.astype(float) / float(total_trees)
    np.fill_diagonal(values, 1.0)
    return FusedProximity(values=values, total_trees=total_trees, config_count=len(configs))

