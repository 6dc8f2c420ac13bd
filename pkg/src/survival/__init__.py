"""
Survival core module
"""
from .dataset import SurvivalDataset, SurvivalRecord, CovariateSpec, NUMERIC, CATEGORICAL
from .cox import CoxFit, PartialLikelihood, cox_fit
from .concordance import concordance_index
from .statistics import (
    KaplanMeierCurve,
    km_estimate,
    logrank_test,
    likelihood_ratio_test,
    chi2_sf,
)

__all__ = [
    "SurvivalDataset",
    "SurvivalRecord",
    "CovariateSpec",
    "NUMERIC",
    "CATEGORICAL",
    "CoxFit",
    "PartialLikelihood",
    "cox_fit",
    "concordance_index",
    "KaplanMeierCurve",
    "km_estimate",
    "logrank_test",
    "likelihood_ratio_test",
    "chi2_sf",
]
