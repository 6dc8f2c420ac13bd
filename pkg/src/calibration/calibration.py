"""
Threshold Calibration
Dense Survival Forest Subgroup Profiler

p* is the lower alpha-quantile of the heterogeneity statistic (minimum
p_leaf over the scanned cluster counts) on data without heterogeneity:
either simulated homogeneous trials or permutations of a real dataset.
"""

import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Dict, List, Optional, Sequence

import numpy as np
from scipy import stats

from config.settings import settings
from src.ensemble.dense import dense_train
from src.ensemble.grid import ParamGrid
from src.profiling.heterogeneity import DF_LEAVES_MINUS_ONE
from src.profiling.selection import heterogeneity_scan, min_p_leaf
from src.simulation.generator import generate_dataset
from src.simulation.scenarios import ScenarioSpec
from src.survival.dataset import SurvivalDataset
from src.utils.errors import ConfigurationError
from src.utils.integrity import keyed_rng
from src.utils.logger import get_logger
from src.utils.parallel import BatchRunner

if TYPE_CHECKING:
    from src.processors.pipeline_processor import PipelineConfig

logger = get_logger(__name__)

SOURCE_SIMULATION = "simulation-pooled"
SOURCE_PERMUTATION = "permutation"
SOURCE_FIXED = "fixed"

TARGET_COVARIATES = "covariates"
TARGET_TREATMENT = "treatment"

MIN_PERMUTATIONS = 20


@dataclass
class CalibrationResult:
    """Calibrated threshold and the null statistics it came from"""
    p_star: float
    sample_count: int
    alpha: float
    source: str
    values: List[float] = field(default_factory=list)
    groups: Dict[str, List[float]] = field(default_factory=dict)

    def to_dict(self) -> Dict:
        return {
            "p_star": self.p_star,
            "sample_count": self.sample_count,
            "alpha": self.alpha,
            "source": self.source,
            "values": list(self.values),
            "groups": {key: list(values) for key, values in self.groups.items()},
        }


def empirical_quantile(values: Sequence[float], alpha: float) -> float:
    """
    Lower empirical quantile: the ceil(alpha * m)-th smallest value

    Args:
        values: Sample of size m >= 1
        alpha: Level in (0, 1)

    Returns:
        One of the sample values
    """
    if len(values) == 0:
        raise ValueError("empirical quantile of an empty list")
    if not 0.0 < alpha < 1.0:
        raise ConfigurationError(f"alpha must lie in (0, 1), got {alpha}")
    ordered = np.sort(np.asarray(values, dtype=float))
    # Tolerate rounding in alpha * m
    rank = max(1, math.ceil(alpha * ordered.size - 1e-12))
    return float(ordered[rank - 1])


def calibrate_by_simulation(null_pleafs: Sequence[float], global_pleafs: Sequence[float],
                            alpha: Optional[float] = None) -> CalibrationResult:
    """p* from the pooled null and global scenario statistics"""
    if len(null_pleafs) == 0 or len(global_pleafs) == 0:
        raise ValueError("simulation calibration needs null and global statistics")
    alpha = settings.DEFAULT_ALPHA if alpha is None else alpha
    pooled = [float(v) for v in null_pleafs] + [float(v) for v in global_pleafs]
    return CalibrationResult(
        p_star=empirical_quantile(pooled, alpha),
        sample_count=len(pooled),
        alpha=alpha,
        source=SOURCE_SIMULATION,
        values=pooled,
        groups={"null": [float(v) for v in null_pleafs], "global": [float(v) for v in global_pleafs]},
    )


def permute_for_null(dataset: SurvivalDataset, rng: np.random.Generator,
                     target: str = TARGET_COVARIATES) -> SurvivalDataset:
    """
    Break covariate x treatment interaction by permutation

    Args:
        dataset: Original data
        rng: Permutation stream
        target: covariates (rows moved as a block against the outcome and arm)
            or treatment (arm labels shuffled)

    Returns:
        Permuted copy
    """
    if dataset.n < 2:
        raise ValueError("permutation needs at least two rows")
    order = rng.permutation(dataset.n)
    if target == TARGET_COVARIATES:
        return dataset.with_covariates(dataset.covariates[order])
    if target == TARGET_TREATMENT:
        return dataset.with_treatment(dataset.treatment[order])
    raise ConfigurationError(f"unknown permutation target '{target}'")


def null_statistic(dataset: SurvivalDataset, grid: ParamGrid, k_range: Sequence[int], min_leaf_size: int,
                   seed: int, df_mode: str = DF_LEAVES_MINUS_ONE) -> float:
    """Minimum p_leaf over the k range, the quantity compared against p*"""
    fused = dense_train(dataset, grid, workers=1)
    return min_p_leaf(heterogeneity_scan(dataset, fused, k_range, min_leaf_size, seed, df_mode))


def _permutation_task(dataset: SurvivalDataset, index: int, seed: int, target: str, grid: ParamGrid,
                      k_range, min_leaf_size: int, df_mode: str) -> float:
    permuted = permute_for_null(dataset, keyed_rng(seed, index), target)
    return null_statistic(permuted, grid, k_range, min_leaf_size, seed, df_mode)


def calibrate_by_permutation(dataset: SurvivalDataset, config: "PipelineConfig", n_perm: Optional[int] = None,
                             alpha: Optional[float] = None, seed: Optional[int] = None) -> CalibrationResult:
    """
    p* from the statistic on permuted copies of the dataset

    Args:
        dataset: Real trial data
        config: Pipeline configuration (grid, k range, leaf size, df rule, target, workers)
        n_perm: Number of permutations, at least 20
        alpha: Target false-heterogeneity rate
        seed: Base seed; permutation i uses the stream keyed by (seed, i)

    Returns:
        CalibrationResult with source "permutation"
    """
    n_perm = config.n_perm if n_perm is None else n_perm
    alpha = config.alpha if alpha is None else alpha
    seed = config.seed if seed is None else seed
    if n_perm < MIN_PERMUTATIONS:
        raise ConfigurationError(f"n_perm must be at least {MIN_PERMUTATIONS}, got {n_perm}")

    grid = config.effective_grid()
    tasks = [
        (dataset, i, seed, config.permutation_target, grid, config.k_range, config.min_leaf_size, config.df_mode)
        for i in range(n_perm)
    ]
    logger.info(f"Permutation calibration: {n_perm} permutations of the {config.permutation_target}")
    values = BatchRunner(max_workers=config.workers).map(_permutation_task, tasks, desc="Permutations")
    values = [float(v) for v in values]
    return CalibrationResult(
        p_star=empirical_quantile(values, alpha),
        sample_count=n_perm,
        alpha=alpha,
        source=SOURCE_PERMUTATION,
        values=values,
        groups={"permutation": values},
    )


def _scenario_task(spec: ScenarioSpec, replicate_seed: int, grid: ParamGrid, k_range, min_leaf_size: int,
                   seed: int, df_mode: str) -> float:
    dataset = generate_dataset(spec, replicate_seed).dataset
    return null_statistic(dataset, grid, k_range, min_leaf_size, seed, df_mode)


def scenario_statistics(spec: ScenarioSpec, replicates: int, config: "PipelineConfig",
                        seed: Optional[int] = None) -> List[float]:
    """
    The statistic on independent replicates of one scenario

    Replicate r is generated with seed (seed + r).
    """
    seed = config.seed if seed is None else seed
    grid = config.effective_grid()
    tasks = [
        (spec, seed + r, grid, config.k_range, config.min_leaf_size, config.seed, config.df_mode)
        for r in range(replicates)
    ]
    values = BatchRunner(max_workers=config.workers).map(_scenario_task, tasks, desc=f"Replicates {spec.name}")
    return [float(v) for v in values]


def ecdf_distance(first: Sequence[float], second: Sequence[float]) -> float:
    """Two-sample Kolmogorov-Smirnov distance"""
    if len(first) == 0 or len(second) == 0:
        raise ValueError("ECDF distance needs two non-empty samples")
    return float(stats.ks_2samp(np.asarray(first, dtype=float), np.asarray(second, dtype=float)).statistic)


def ecdf_rows(label: str, values: Sequence[float]) -> List[Dict]:
    """Sorted values with their ECDF heights, for export"""
    ordered = np.sort(np.asarray(values, dtype=float))
    m = ordered.size
    return [{"group": label, "p_leaf": float(v), "ecdf": (i + 1) / m} for i, v in enumerate(ordered)]
