import logging
from typing import List, NamedTuple, Optional, Sequence

import numpy as np
import pandas

from linkbudget.params import linear_to_db
from protection.config import ProtectionConfig

logger = logging.getLogger(__name__)

VIOLATION_COLUMNS = [
    "handover_t",
    "user_id",
    "avg_inr_db",
    "max_inr_db",
    "avg_violated",
    "abs_violated",
]
GAP_COLUMNS = ["handover_t", "worst_mean_inr", "split_bound_inr", "gap"]


class WindowReport(NamedTuple):
    """Realised windowed INR per (handover, user) and the split-bound slack.

    zero_filled lists the handovers whose past window reaches before slot 0.
    """

    violations: pandas.DataFrame
    gaps: pandas.DataFrame
    zero_filled: List[int]

    @property
    def avg_flags(self) -> int:
        return int(self.violations["avg_violated"].sum())

    @property
    def abs_flags(self) -> int:
        return int(self.violations["abs_violated"].sum())


def verify_window(
    trace,
    handover_slots: Sequence[int],
    cfg: ProtectionConfig,
    user_ids: Optional[Sequence[int]] = None,
    tolerance: float = 1e-9,
) -> WindowReport:
    """Checks a realised INR trace against both protection constraints.

    Args:
        trace: (slots, U) realised linear INR at the protected users.
        handover_slots: slots at which an association was decided; only those
            whose whole window [t, t + T_h) lies inside the trace are checked.
        tolerance: relative slack before a value counts as a violation.
    """
    trace = np.asarray(trace, dtype=float)
    slots, users = trace.shape
    user_ids = np.arange(users) if user_ids is None else np.asarray(user_ids)
    past, horizon = cfg.window_past, cfg.handover_period
    padded = np.vstack([np.zeros((past, users)), trace])

    frames, gaps, zero_filled = [], [], []
    for t in handover_slots:
        if t + horizon > slots:
            continue
        if t - past < 0:
            zero_filled.append(int(t))
        past_sum = padded[t : t + past].sum(axis=0)
        horizon_rows = trace[t : t + horizon]
        mean = (past_sum + horizon_rows.sum(axis=0)) / cfg.window_length
        peak = horizon_rows.max(axis=0)
        frames.append(
            pandas.DataFrame(
                {
                    "handover_t": int(t),
                    "user_id": user_ids,
                    "avg_inr_db": linear_to_db(mean),
                    "max_inr_db": linear_to_db(peak),
                    "avg_violated": mean > cfg.avg_threshold * (1 + tolerance),
                    "abs_violated": peak > cfg.max_threshold * (1 + tolerance),
                }
            )
        )
        worst = float(mean.max())
        bound = float((past_sum.max() + horizon_rows.sum(axis=0).max()) / cfg.window_length)
        gaps.append((int(t), worst, bound, bound - worst))

    violations = (
        pandas.concat(frames, ignore_index=True)
        if frames
        else pandas.DataFrame(columns=VIOLATION_COLUMNS)
    )
    report = WindowReport(violations, pandas.DataFrame(gaps, columns=GAP_COLUMNS), zero_filled)
    if report.avg_flags or report.abs_flags:
        logger.warning(
            f"Window check: {report.avg_flags} time-average and {report.abs_flags} absolute violations"
        )
    return report
