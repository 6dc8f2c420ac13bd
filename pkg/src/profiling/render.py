"""
Profile Rendering
Dense Survival Forest Subgroup Profiler
"""

from typing import Dict, List

from src.forest.node import TreeNode, node_to_dict
from src.profiling.heterogeneity import LeafEffect, LeafEffects
from src.profiling.selection import ProfileResult


def _leaf_line(effect: LeafEffect) -> str:
    hr = "undefined" if effect.hazard_ratio is None else f"{effect.hazard_ratio:.3f}"
    line = (
        f"leaf {effect.leaf_id}: n={effect.size} (control {effect.n_control}, treated {effect.n_treated}), "
        f"HR={hr}, log-rank p={effect.logrank_p:.4g}"
    )
    if effect.flags:
        line += f" [{'; '.join(effect.flags)}]"
    return line


def _render_node(node: TreeNode, effects: Dict[int, LeafEffect], names: List[str], levels: Dict[int, tuple],
                 indent: int, lines: List[str]):
    pad = "  " * indent
    if node.is_terminal:
        effect = effects.get(node.terminal_id)
        lines.append(pad + (_leaf_line(effect) if effect else f"leaf {node.terminal_id}: n={node.size}"))
        return
    for side, child in (("left", node.left), ("right", node.right)):
        lines.append(f"{pad}{node.describe(names, levels, side)} (n={child.size})")
        _render_node(child, effects, names, levels, indent + 1, lines)


def render_profile_text(result: ProfileResult) -> str:
    """
    Indented text tree, one condition or leaf per line

    Args:
        result: Selected profile

    Returns:
        Multi-line string ending with a newline
    """
    schema = result.tree.schema
    names = [spec.name for spec in schema]
    levels = {j: spec.levels for j, spec in enumerate(schema) if spec.is_categorical}
    verdict = "heterogeneous" if result.heterogeneous else "homogeneous"
    k = "-" if result.k is None else str(result.k)

    lines = [
        f"verdict: {verdict} (k={k}, leaves={result.num_leaves}, p_leaf={result.p_leaf:.4g}, "
        f"p*={result.p_star:.4g}, metric={result.metric:.4g})",
        f"all patients (n={result.tree.root.size})",
    ]
    _render_node(result.tree.root, result.leaf_effects.by_leaf(), names, levels, 1, lines)
    return "\n".join(lines) + "\n"


def leaf_effects_rows(effects: LeafEffects) -> List[Dict]:
    """Flat per-leaf rows for CSV export"""
    return [
        {
            "leaf": effect.leaf_id,
            "n_control": effect.n_control,
            "n_treated": effect.n_treated,
            "events_control": effect.events_control,
            "events_treated": effect.events_treated,
            "hazard_ratio": "" if effect.hazard_ratio is None else effect.hazard_ratio,
            "logrank_p": effect.logrank_p,
            "flags": ";".join(effect.flags),
        }
        for effect in effects
    ]


def profile_to_document(result: ProfileResult) -> Dict:
    """Machine-readable profile document (JSON-serializable)"""
    schema = result.tree.schema
    return {
        "heterogeneous": bool(result.heterogeneous),
        "k": result.k,
        "num_leaves": int(result.num_leaves),
        "p_leaf": float(result.p_leaf),
        "p_star": float(result.p_star),
        "metric": float(result.metric),
        "min_p_leaf": float(result.min_p_leaf),
        "min_leaf_size": int(result.tree.min_leaf_size),
        "covariates": [
            {"name": spec.name, "kind": spec.kind, "levels": list(spec.levels)} for spec in schema
        ],
        "tree": node_to_dict(result.tree.root, [spec.name for spec in schema]),
        "leaves": [
            {
                "leaf": effect.leaf_id,
                "n_control": effect.n_control,
                "n_treated": effect.n_treated,
                "events_control": effect.events_control,
                "events_treated": effect.events_treated,
                "hazard_ratio": effect.hazard_ratio,
                "logrank_p": effect.logrank_p,
                "flags": list(effect.flags),
            }
            for effect in result.leaf_effects
        ],
        "candidates": [
            {
                "k": candidate.k,
                "num_leaves": candidate.num_leaves,
                "p_leaf": candidate.p_leaf,
                "diagnostic": candidate.test.diagnostic,
            }
            for candidate in result.candidates
        ],
    }
