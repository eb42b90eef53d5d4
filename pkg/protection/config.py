import math
from typing import List, NamedTuple

from linkbudget.params import db_to_linear


class ProtectionError(ValueError):
    """Base error for module"""


class ProtectionConfig(NamedTuple):
    """Thresholds and windows of the time-averaged and absolute constraints.

    Windows are in slots. The absolute threshold may be +inf, which turns the
    absolute constraint off.
    """

    inr_avg_threshold_db: float = -6.0
    inr_max_threshold_db: float = math.inf
    window_past: int = 100
    handover_period: int = 150

    @property
    def avg_threshold(self) -> float:
        return db_to_linear(self.inr_avg_threshold_db)

    @property
    def max_threshold(self) -> float:
        return db_to_linear(self.inr_max_threshold_db)

    @property
    def window_length(self) -> int:
        """Slots covered by one time-averaged check, T_w + T_h."""
        return self.window_past + self.handover_period

    def problems(self) -> List[str]:
        found = []
        if math.isnan(self.inr_avg_threshold_db) or math.isinf(self.inr_avg_threshold_db):
            found.append(f"inr_avg_threshold_db must be finite, got {self.inr_avg_threshold_db}")
        if not self.inr_max_threshold_db >= self.inr_avg_threshold_db:
            found.append(
                f"inr_max_threshold_db ({self.inr_max_threshold_db}) must be at least "
                f"inr_avg_threshold_db ({self.inr_avg_threshold_db})"
            )
        if self.window_past < 0:
            found.append(f"window_past cannot be negative, got {self.window_past}")
        if self.handover_period < 1:
            found.append(f"handover_period must be at least one slot, got {self.handover_period}")
        return found


def validate_protection(cfg: ProtectionConfig) -> ProtectionConfig:
    problems = cfg.problems()
    if problems:
        raise ProtectionError("; ".join(problems))
    return cfg
