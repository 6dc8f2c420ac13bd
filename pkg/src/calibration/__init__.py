"""
Calibration module
"""
from .calibration import (
    CalibrationResult,
    empirical_quantile,
    calibrate_by_simulation,
    permute_for_null,
    calibrate_by_permutation,
    null_statistic,
    scenario_statistics,
    ecdf_distance,
    ecdf_rows,
    SOURCE_SIMULATION,
    SOURCE_PERMUTATION,
    SOURCE_FIXED,
    TARGET_COVARIATES,
    TARGET_TREATMENT,
)

__all__ = [
    "CalibrationResult",
    "empirical_quantile",
    "calibrate_by_simulation",
    "permute_for_null",
    "calibrate_by_permutation",
    "null_statistic",
    "scenario_statistics",
    "ecdf_distance",
    "ecdf_rows",
    "SOURCE_SIMULATION",
    "SOURCE_PERMUTATION",
    "SOURCE_FIXED",
    "TARGET_COVARIATES",
    "TARGET_TREATMENT",
]
