"""
Gradient Grids
Dense Survival Forest Subgroup Profiler

Maps a profile's subgroups onto the (X6, X7) plane. Each pixel carries
+(1 - p) when its subgroup's treatment hazard ratio is at most 1 and
-(1 - p) otherwise, p being the subgroup's log-rank p-value.
"""

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.spatial import cKDTree

from config.settings import settings
from src.profiling.heterogeneity import leaf_effects
from src.profiling.profile_tree import assign_leaves
from src.profiling.selection import ProfileResult
from src.simulation.generator import GeneratedDataset
from src.simulation.scenarios import NEGATIVE, POSITIVE, ScenarioSpec, true_region
from src.survival.dataset import SurvivalDataset

# X6 and X7 (0-based)
DEFAULT_PAIR = (5, 6)


def grid_axis() -> np.ndarray:
    """-1.5 to 1.5 in steps of 0.01 (301 points)"""
    count = int(round((settings.GRADIENT_HIGH - settings.GRADIENT_LOW) / settings.GRADIENT_SPACING)) + 1
    return np.linspace(settings.GRADIENT_LOW, settings.GRADIENT_HIGH, count)


@dataclass
class GradientGrid:
    """Pixel values in [-1, 1]; rows follow the second covariate of the pair, columns the first"""
    values: np.ndarray
    axis: np.ndarray
    pair: Tuple[int, int] = DEFAULT_PAIR

    @property
    def shape(self) -> Tuple[int, int]:
        return tuple(self.values.shape)


def _pixel_covariates(reference: np.ndarray, pair: Tuple[int, int], axis: np.ndarray) -> np.ndarray:
    """Covariate rows of every pixel; off-pair values copied from the nearest reference patient"""
    first, second = np.meshgrid(axis, axis)
    coordinates = np.column_stack([first.ravel(), second.ravel()])
    _, nearest = cKDTree(reference[:, list(pair)]).query(coordinates, k=1)
    pixels = reference[nearest].copy()
    pixels[:, pair[0]] = coordinates[:, 0]
    pixels[:, pair[1]] = coordinates[:, 1]
    return pixels


def gradient_for_profile(profile: ProfileResult, eval_data, pair: Sequence[int] = DEFAULT_PAIR,
                         axis: Optional[np.ndarray] = None) -> GradientGrid:
    """
    Gradient grid of one profile, effects estimated on an evaluation dataset

    Args:
        profile: Selected profile
        eval_data: GeneratedDataset or SurvivalDataset from the same distribution
        pair: Plotted covariate indices
        axis: Pixel coordinates (the standard 301-point axis when None)

    Returns:
        GradientGrid; pixels whose subgroup has no defined hazard ratio are 0
    """
    dataset: SurvivalDataset = eval_data.dataset if isinstance(eval_data, GeneratedDataset) else eval_data
    axis = grid_axis() if axis is None else np.asarray(axis, dtype=float)
    pair = (int(pair[0]), int(pair[1]))

    effects = leaf_effects(dataset, assign_leaves(profile.tree, dataset.covariates)).by_leaf()
    leaf_value = {}
    for leaf_id, effect in effects.items():
        if effect.hazard_ratio is None:
            leaf_value[leaf_id] = 0.0
            continue
        strength = 1.0 - effect.logrank_p
        leaf_value[leaf_id] = strength if effect.hazard_ratio <= 1.0 else -strength

    pixels = _pixel_covariates(dataset.covariates, pair, axis)
    pixel_leaves = assign_leaves(profile.tree, pixels)
    values = np.array([leaf_value.get(int(leaf), 0.0) for leaf in pixel_leaves], dtype=float)
    return GradientGrid(values=values.reshape(axis.size, axis.size), axis=axis, pair=pair)


def averaged_gradient(grids: Sequence[GradientGrid]) -> GradientGrid:
    """Pixel-wise mean of equally shaped grids"""
    if not grids:
        raise ValueError("no grids to average")
    shape = grids[0].shape
    for grid in grids[1:]:
        if grid.shape != shape:
            raise ValueError(f"grid shapes differ: {shape} vs {grid.shape}")
    values = np.mean(np.stack([grid.values for grid in grids]), axis=0)
    return GradientGrid(values=values, axis=grids[0].axis, pair=grids[0].pair)


def true_region_gradient(spec: ScenarioSpec, pair: Sequence[int] = DEFAULT_PAIR,
                         axis: Optional[np.ndarray] = None) -> GradientGrid:
    """Ground truth: +1 in the benefit region, -1 in the harm region, 0 elsewhere"""
    axis = grid_axis() if axis is None else np.asarray(axis, dtype=float)
    pair = (int(pair[0]), int(pair[1]))
    first, second = np.meshgrid(axis, axis)
    covariates = np.zeros((first.size, spec.p))
    covariates[:, pair[0]] = first.ravel()
    covariates[:, pair[1]] = second.ravel()

    labels = true_region(spec, covariates)
    values = np.where(labels == POSITIVE, 1.0, np.where(labels == NEGATIVE, -1.0, 0.0))
    return GradientGrid(values=values.reshape(axis.size, axis.size), axis=axis, pair=pair)
