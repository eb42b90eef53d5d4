"""Accumulates per-slot link state into the evaluation tables of one run."""
import logging
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
import pandas

from association.grid import UserSet
from association.matrix import AssociationMatrix
from linkbudget.engine import LinkState
from linkbudget.params import linear_to_db
from metrics.distributions import empirical_cdf
from metrics.rates import MetricsError, exceedance, per_user_violation, utilization, violation_rate_series
from orbits.constants import PRIMARY, SECONDARY

logger = logging.getLogger(__name__)

REPRESENTATIVE = "representative"
RANDOM = "random"
INR = "inr"
SINR = "sinr"

# Level quoted for the unprotected primary INR distribution.
REFERENCE_INR_DB = -12.2

VIOLATION_RATE_COLUMNS = ["time_s", "violation_rate"]
UTILIZATION_COLUMNS = ["time_s", "utilization", "served_clusters", "outage_clusters"]
PER_USER_COLUMNS = ["user_id", "violation_fraction"]
INR_CDF_COLUMNS = ["system", "pool", "inr_db", "fraction"]
SINR_CDF_COLUMNS = ["system", "pool", "sinr_db", "fraction"]

PoolKey = Tuple[str, str, str]  # (system, pool, quantity)


class MetricsReport(NamedTuple):
    """Evaluation tables of one run.

    The primary trace holds realised linear INR at the representative
    primary users, one row per slot; violation metrics are taken over it.
    Pools hold linear samples keyed by (system, pool, quantity).
    """

    threshold_db: float
    slot_duration: float
    violation_rate: pandas.DataFrame
    utilization: pandas.DataFrame
    per_user_violation: pandas.DataFrame
    pools: Dict[PoolKey, np.ndarray]
    primary_trace: np.ndarray

    def _cdf(self, quantity: str, columns: List[str]) -> pandas.DataFrame:
        frames = []
        for (system, pool, kind), samples in sorted(self.pools.items()):
            if kind != quantity or samples.size == 0:
                continue
            cdf = empirical_cdf(linear_to_db(samples))
            frames.append(
                pandas.DataFrame(
                    {
                        "system": system,
                        "pool": pool,
                        columns[2]: cdf["value"].to_numpy(),
                        "fraction": cdf["fraction"].to_numpy(),
                    }
                )
            )
        if not frames:
            return pandas.DataFrame(columns=columns)
        return pandas.concat(frames, ignore_index=True)[columns]

    def inr_cdf(self) -> pandas.DataFrame:
        return self._cdf(INR, INR_CDF_COLUMNS)

    def sinr_cdf(self) -> pandas.DataFrame:
        return self._cdf(SINR, SINR_CDF_COLUMNS)

    def pool(self, system: str, pool: str, quantity: str) -> np.ndarray:
        return self.pools.get((system, pool, quantity), np.zeros(0))

    def reference_exceedance(self, reference_db: float = REFERENCE_INR_DB) -> float:
        """Share of representative primary (user, slot) INR samples above reference_db."""
        samples = self.pool(PRIMARY, REPRESENTATIVE, INR)
        return exceedance(linear_to_db(samples), reference_db) if samples.size else 0.0

    def summary(self) -> Dict:
        rates = self.violation_rate["violation_rate"]
        utilizations = self.utilization["utilization"]
        return {
            "slots": int(len(self.violation_rate)),
            "handovers": int(len(self.utilization)),
            "threshold_db": self.threshold_db,
            "mean_violation_rate": float(rates.mean()) if len(rates) else 0.0,
            "max_violation_rate": float(rates.max()) if len(rates) else 0.0,
            "mean_utilization": float(utilizations.mean()) if len(utilizations) else 0.0,
            "outage_handovers": int((utilizations < 1).sum()),
            "reference_inr_db": REFERENCE_INR_DB,
            "fraction_above_reference": self.reference_exceedance(),
            "users_below_5pct_violation": (
                float((self.per_user_violation["violation_fraction"] < 0.05).mean())
                if len(self.per_user_violation)
                else 1.0
            ),
        }


class MetricsCollector:
    """Builds a MetricsReport block by block as the simulation advances."""

    def __init__(self, threshold_db: float, slot_duration: float, primary_users: UserSet):
        self.threshold_db = threshold_db
        self.slot_duration = slot_duration
        self.primary_ids = primary_users.user_ids[primary_users.representative]
        self._representative = primary_users.representative
        self._trace: List[np.ndarray] = []
        self._slots: List[np.ndarray] = []
        self._handovers: List[Tuple] = []
        self._pools: Dict[PoolKey, List[np.ndarray]] = {}

    def _pool(self, key: PoolKey, samples: np.ndarray) -> None:
        samples = np.asarray(samples, dtype=float).ravel()
        if not np.all(np.isfinite(samples)):
            raise MetricsError(f"Non-finite {key[2]} samples for {key[0]} {key[1]} users")
        self._pools.setdefault(key, []).append(samples)

    def _pool_state(self, system: str, state: LinkState, representative: np.ndarray) -> None:
        for pool, mask in ((REPRESENTATIVE, representative), (RANDOM, ~representative)):
            if not mask.any():
                continue
            self._pool((system, pool, INR), state.inr[:, mask])
            served = state.served[:, mask]
            self._pool((system, pool, SINR), state.sinr[:, mask][served])

    def record_block(
        self,
        slots: Sequence[int],
        primary: LinkState,
        secondary: Optional[LinkState] = None,
        secondary_users: Optional[UserSet] = None,
    ) -> None:
        """Adds the link state of consecutive slots for both systems."""
        slots = np.asarray(slots, dtype=int)
        if primary.inr.shape[0] != len(slots):
            raise MetricsError(f"Link state covers {primary.inr.shape[0]} slots, expected {len(slots)}")
        self._slots.append(slots)
        self._trace.append(primary.inr[:, self._representative])
        self._pool_state(PRIMARY, primary, self._representative)
        if secondary is not None:
            self._pool_state(SECONDARY, secondary, secondary_users.representative)

    def record_handover(self, slot: int, association: AssociationMatrix) -> None:
        outage = association.unserved()
        self._handovers.append(
            (
                round(slot * self.slot_duration, 6),
                utilization(association),
                association.served(),
                ";".join(str(cluster) for cluster in outage),
            )
        )

    def finish(self) -> MetricsReport:
        users = len(self.primary_ids)
        trace = np.vstack(self._trace) if self._trace else np.zeros((0, users))
        slots = np.concatenate(self._slots) if self._slots else np.zeros(0, dtype=int)
        rates = violation_rate_series(trace, self.threshold_db)
        per_user = per_user_violation(trace, self.threshold_db)
        report = MetricsReport(
            self.threshold_db,
            self.slot_duration,
            pandas.DataFrame(
                {"time_s": np.round(slots * self.slot_duration, 6), "violation_rate": rates},
                columns=VIOLATION_RATE_COLUMNS,
            ),
            pandas.DataFrame(self._handovers, columns=UTILIZATION_COLUMNS),
            pandas.DataFrame(
                {"user_id": self.primary_ids, "violation_fraction": per_user}, columns=PER_USER_COLUMNS
            ),
            {key: np.concatenate(parts) for key, parts in self._pools.items()},
            trace,
        )
        summary = report.summary()
        logger.info(
            f"Metrics over {len(slots)} slots: mean violation rate "
            f"{summary['mean_violation_rate']:.4f}, mean utilization {summary['mean_utilization']:.4f}"
        )
        return report
