"""The time-averaged and absolute protection constraints at a handover.

Over a handover window [t, t + T_h) the time-averaged requirement
mean over [t - T_w, t + T_h) <= avg threshold is split into a known past
part and the part the next association controls. Taking the worst user
separately in each part gives a per-handover threshold on the horizon
average alone.
"""
import numpy as np

from protection.config import ProtectionConfig
from protection.history import InterferenceHistory


def effective_avg_threshold(history: InterferenceHistory, cfg: ProtectionConfig, t: int) -> float:
    """Linear bound on the horizon-average INR the association at t may add.

    May be zero or negative when the past window already used up the budget.
    """
    past = history.window_sum(t, cfg.window_past)
    worst_past = float(past.max()) if past.size else 0.0
    return (cfg.window_length * cfg.avg_threshold - worst_past) / cfg.handover_period


def horizon_avg_inr(contributions, handover_period: int) -> np.ndarray:
    """Per-user horizon average of per-slot INR contributions.

    Args:
        contributions: (T, ...) per-slot linear INR with T <= handover_period;
            slots past the end of a run are simply missing.
    """
    contributions = np.asarray(contributions, dtype=float)
    return contributions.sum(axis=0) / handover_period


def horizon_max_inr(contributions) -> np.ndarray:
    """Per-user maximum over the window, zero for an empty window."""
    contributions = np.asarray(contributions, dtype=float)
    if contributions.shape[0] == 0:
        return np.zeros(contributions.shape[1:])
    return contributions.max(axis=0)
