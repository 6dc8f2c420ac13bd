"""
Tree Nodes
Dense Survival Forest Subgroup Profiler

Binary tree structure shared by forest trees and profile trees. Numeric
splits send x <= threshold left; categorical splits send the levels in
`left_levels` left.
"""

from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterator, List, Optional, Set

import numpy as np


@dataclass
class TreeNode:
    """Internal node (variable + rule, two children) or terminal node (terminal id)"""
    variable: Optional[int] = None
    threshold: Optional[float] = None
    left_levels: Optional[FrozenSet[int]] = None
    left: Optional["TreeNode"] = None
    right: Optional["TreeNode"] = None
    terminal_id: Optional[int] = None
    size: int = 0
    depth: int = 0
    score: Optional[float] = None

    @property
    def is_terminal(self) -> bool:
        return self.left is None and self.right is None

    def goes_left(self, column: np.ndarray) -> np.ndarray:
        if self.left_levels is not None:
            return np.isin(column, np.fromiter(self.left_levels, dtype=float))
        return column <= self.threshold

    def describe(self, names: Optional[List[str]] = None, levels: Optional[Dict[int, tuple]] = None,
                 side: str = "left") -> str:
        """Human-readable condition for the given child side"""
        name = names[self.variable] if names else f"x{self.variable}"
        if self.left_levels is not None:
            labels = levels.get(self.variable) if levels else None
            chosen = sorted(self.left_levels)
            if labels:
                chosen = [labels[i] for i in chosen]
            op = "in" if side == "left" else "not in"
            return f"{name} {op} {{{', '.join(str(c) for c in chosen)}}}"
        op = "<=" if side == "left" else ">"
        return f"{name} {op} {self.threshold:.6g}"


def iter_nodes(root: TreeNode) -> Iterator[TreeNode]:
    """Depth-first, left before right"""
    stack = [root]
    while stack:
        node = stack.pop()
        yield node
        if not node.is_terminal:
            stack.append(node.right)
            stack.append(node.left)


def terminal_nodes(root: TreeNode) -> List[TreeNode]:
    return [node for node in iter_nodes(root) if node.is_terminal]


def assign_terminal_ids(root: TreeNode) -> int:
    """Number terminals 0..L-1 in depth-first order; returns L"""
    count = 0
    for node in iter_nodes(root):
        if node.is_terminal:
            node.terminal_id = count
            count += 1
    return count


def split_variables(root: TreeNode) -> Set[int]:
    return {node.variable for node in iter_nodes(root) if not node.is_terminal}


def internal_depth(root: TreeNode) -> int:
    """Largest number of internal nodes on a root-to-terminal path"""
    if root.is_terminal:
        return 0
    return 1 + max(internal_depth(root.left), internal_depth(root.right))


def route(root: TreeNode, covariates: np.ndarray) -> np.ndarray:
    """
    Terminal id reached by every row

    Args:
        root: Tree root
        covariates: n x p matrix

    Returns:
        Length-n integer array of terminal ids
    """
    covariates = np.asarray(covariates, dtype=float)
    out = np.full(covariates.shape[0], -1, dtype=np.int32)
    stack = [(root, np.arange(covariates.shape[0]))]
    while stack:
        node, rows = stack.pop()
        if rows.size == 0:
            continue
        if node.is_terminal:
            out[rows] = node.terminal_id
            continue
        left_mask = node.goes_left(covariates[rows, node.variable])
        stack.append((node.right, rows[~left_mask]))
        stack.append((node.left, rows[left_mask]))
    return out


def node_to_dict(node: TreeNode, names: Optional[List[str]] = None) -> Dict:
    """Nested dictionary form used by the JSON tree document"""
    if node.is_terminal:
        return {"terminal_id": node.terminal_id, "size": node.size}
    document = {
        "variable": node.variable,
        "size": node.size,
        "left": node_to_dict(node.left, names),
        "right": node_to_dict(node.right, names),
    }
    if names:
        document["variable_name"] = names[node.variable]
    if node.left_levels is not None:
        document["left_levels"] = sorted(int(v) for v in node.left_levels)
    else:
        document["threshold"] = float(node.threshold)
    return document


def node_from_dict(document: Dict, depth: int = 0) -> TreeNode:
    if "terminal_id" in document:
        return TreeNode(terminal_id=int(document["terminal_id"]), size=int(document.get("size", 0)), depth=depth)
    left_levels = document.get("left_levels")
    return TreeNode(
        variable=int(document["variable"]),
        threshold=None if left_levels is not None else float(document["threshold"]),
        left_levels=frozenset(int(v) for v in left_levels) if left_levels is not None else None,
        left=node_from_dict(document["left"], depth + 1),
        right=node_from_dict(document["right"], depth + 1),
        size=int(document.get("size", 0)),
        depth=depth,
    )
