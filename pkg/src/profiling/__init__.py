"""
Profiling module
"""
from .profile_tree import ProfileTree, fit_profile_tree, assign_leaves
from .heterogeneity import (
    HeterogeneityTest,
    LeafEffect,
    LeafEffects,
    heterogeneity_test,
    leaf_effects,
    DF_LEAVES_MINUS_ONE,
    DF_TWICE_LEAVES_MINUS_ONE,
)
from .selection import (
    KCandidate,
    ProfileResult,
    selection_metric,
    passes_threshold,
    heterogeneity_scan,
    select_best_profile,
    min_p_leaf,
)
from .render import render_profile_text, profile_to_document, leaf_effects_rows

__all__ = [
    "ProfileTree",
    "fit_profile_tree",
    "assign_leaves",
    "HeterogeneityTest",
    "LeafEffect",
    "LeafEffects",
    "heterogeneity_test",
    "leaf_effects",
    "DF_LEAVES_MINUS_ONE",
    "DF_TWICE_LEAVES_MINUS_ONE",
    "KCandidate",
    "ProfileResult",
    "selection_metric",
    "passes_threshold",
    "heterogeneity_scan",
    "select_best_profile",
    "min_p_leaf",
    "render_profile_text",
    "profile_to_document",
    "leaf_effects_rows",
]
