"""
Concordance Index
Dense Survival Forest Subgroup Profiler
"""

import numpy as np

from src.utils.errors import NoComparablePairsError

# Above this many distinct risk values the pairwise path is used
_LEVEL_PATH_MAX = 64
_CHUNK = 512


def concordance_index(risk_scores, times, events) -> float:
    """
    Harrell's C for risk scores (higher score = earlier expected event)

    A pair (i, j) is comparable when t_i < t_j and patient i had an event.
    It is concordant when risk_i > risk_j; tied risks count one half. Pairs
    with equal times are never comparable.

    Args:
        risk_scores: Predicted risk per patient
        times: Observed times
        events: Event indicators

    Returns:
        C-index in [0, 1]
    """
    risk = np.asarray(risk_scores, dtype=float)
    t = np.asarray(times, dtype=float)
    d = np.asarray(events, dtype=bool)
    if not (risk.shape == t.shape == d.shape) or risk.ndim != 1:
        raise ValueError("risk_scores, times and events must be 1-D arrays of equal length")

    levels, level_of = np.unique(risk, return_inverse=True)
    if len(levels) <= _LEVEL_PATH_MAX:
        concordant, tied, comparable = _counts_by_level(level_of, len(levels), t, d)
    else:
        concordant, tied, comparable = _counts_pairwise(risk, t, d)

    if comparable == 0:
        raise NoComparablePairsError()
    return float((concordant + 0.5 * tied) / comparable)


def _counts_by_level(level_of: np.ndarray, n_levels: int, t: np.ndarray, d: np.ndarray):
    """Pair counts when risk takes few distinct values (e.g. binary designs)"""
    event_rows = np.flatnonzero(d)
    if event_rows.size == 0:
        return 0.0, 0.0, 0.0
    event_times = t[event_rows]

    # later[e, r] = number of patients at risk level r with time strictly after event e
    later = np.empty((event_rows.size, n_levels), dtype=np.int64)
    for r in range(n_levels):
        level_times = np.sort(t[level_of == r])
        later[:, r] = level_times.size - np.searchsorted(level_times, event_times, side='right')

    cumulative = np.cumsum(later, axis=1)
    own = level_of[event_rows]
    idx = np.arange(own.size)
    below = np.where(own > 0, cumulative[idx, np.maximum(own - 1, 0)], 0)
    tied = later[idx, own]
    comparable = cumulative[:, -1]
    return float(below.sum()), float(tied.sum()), float(comparable.sum())


def _counts_pairwise(risk: np.ndarray, t: np.ndarray, d: np.ndarray):
    event_rows = np.flatnonzero(d)
    concordant = tied = comparable = 0.0
    for start in range(0, event_rows.size, _CHUNK):
        rows = event_rows[start:start + _CHUNK]
        later = t[None, :] > t[rows, None]
        diff = risk[rows, None] - risk[None, :]
        comparable += later.sum()
        concordant += (later & (diff > 0)).sum()
        tied += (later & (diff == 0)).sum()
    return float(concordant), float(tied), float(comparable)
