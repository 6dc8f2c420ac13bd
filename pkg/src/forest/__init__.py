"""
Forest module
"""
from .config import ForestConfig, SplitRuleParams
from .node import TreeNode, route, terminal_nodes, split_variables
from .split_rule import SplitCandidate, evaluate_split, best_split, candidate_cutpoints, categorical_bipartitions
from .tree import grow_tree
from .forest import MembershipMatrix, train_forest
from .proximity import ProximityMatrix, proximity_from_membership, cooccurrence_counts

__all__ = [
    "ForestConfig",
    "SplitRuleParams",
    "TreeNode",
    "route",
    "terminal_nodes",
    "split_variables",
    "SplitCandidate",
    "evaluate_split",
    "best_split",
    "candidate_cutpoints",
    "categorical_bipartitions",
    "grow_tree",
    "MembershipMatrix",
    "train_forest",
    "ProximityMatrix",
    "proximity_from_membership",
    "cooccurrence_counts",
]
