"""
Evaluation module
"""
from .gradient import GradientGrid, gradient_for_profile, averaged_gradient, true_region_gradient, grid_axis
from .recovery import RecoveryReport, covariate_recovery
from .baseline import kmeans_baseline, encode_covariates

__all__ = [
    "GradientGrid",
    "gradient_for_profile",
    "averaged_gradient",
    "true_region_gradient",
    "grid_axis",
    "RecoveryReport",
    "covariate_recovery",
    "kmeans_baseline",
    "encode_covariates",
]
