import logging
from typing import NamedTuple, Optional

import numpy as np

from association.grid import UserSet
from association.sources import SourceCoverageError
from linkbudget.engine import LinkEngine
from protection.constraints import horizon_avg_inr, horizon_max_inr

logger = logging.getLogger(__name__)


class CoefficientError(LookupError):
    """Base error for module"""


class CoeffTable(NamedTuple):
    """Capacity and interference coefficients of every candidate at one handover.

    Candidate k is the pair (satellites[k], clusters[k]). INR arrays are
    linear and cover the protected users in UserSet order.
    """

    t: int
    n_clusters: int
    clusters: np.ndarray  # (K,)
    satellites: np.ndarray  # (K,)
    capacity: np.ndarray  # (K,)
    avg_inr: np.ndarray  # (K, U) horizon averages
    peak_inr: np.ndarray  # (K, U) per-user maxima over the window
    mean_slot: np.ndarray  # (K,) mean over (slot, user)
    slot_inr: Optional[np.ndarray] = None  # (K, T, U), kept when the absolute check needs it

    def __len__(self):
        return len(self.clusters)

    @property
    def users(self) -> int:
        return self.avg_inr.shape[1]

    @property
    def worst_avg(self) -> np.ndarray:
        return self.avg_inr.max(axis=1) if self.users else np.zeros(len(self))

    @property
    def worst_slot(self) -> np.ndarray:
        return self.peak_inr.max(axis=1) if self.users else np.zeros(len(self))

    @property
    def mean_avg(self) -> np.ndarray:
        return self.avg_inr.mean(axis=1) if self.users else np.zeros(len(self))

    @property
    def satellite_ids(self) -> np.ndarray:
        """Distinct candidate satellites, ascending."""
        return np.unique(self.satellites)

    @property
    def satellite_index(self) -> np.ndarray:
        """Position of each candidate's satellite in satellite_ids."""
        return np.searchsorted(self.satellite_ids, self.satellites)

    def of_cluster(self, cluster: int) -> np.ndarray:
        return np.flatnonzero(self.clusters == cluster)


def coefficient_table(
    t: int,
    n_clusters: int,
    clusters,
    satellites,
    capacity,
    slot_inr,
    handover_period: int,
    keep_slot_inr: bool = True,
) -> CoeffTable:
    """Assembles a table from per-candidate (T, U) per-slot INR arrays."""
    slot_inr = np.asarray(slot_inr, dtype=float)
    if slot_inr.ndim != 3:
        raise CoefficientError(f"Per-slot INR must be (K, T, U), got shape {slot_inr.shape}")
    capacity = np.asarray(capacity, dtype=float)
    if np.any(capacity < 0):
        raise CoefficientError("Capacities cannot be negative")
    by_slot = np.moveaxis(slot_inr, 1, 0)
    return CoeffTable(
        t,
        n_clusters,
        np.asarray(clusters, dtype=int),
        np.asarray(satellites, dtype=int),
        capacity,
        horizon_avg_inr(by_slot, handover_period),
        horizon_max_inr(by_slot),
        slot_inr.mean(axis=(1, 2)) if slot_inr.size else np.zeros(len(slot_inr)),
        slot_inr if keep_slot_inr else None,
    )


def build_coefficients(
    t: int,
    engine: LinkEngine,
    users: UserSet,
    handover_period: int,
    end_slot: Optional[int] = None,
    keep_slot_inr: bool = True,
) -> CoeffTable:
    """Coefficients of every overhead secondary candidate for the window at t.

    The window is [t, t + handover_period), cut at end_slot. Only satellites
    in a cluster's overhead set at t become candidates for it.

    Raises:
        CoefficientError: if the primary association does not cover the window.
    """
    stop = t + handover_period if end_slot is None else min(t + handover_period, end_slot)
    slots = np.arange(t, stop)
    try:
        table = engine.primary_table(slots)
    except SourceCoverageError as error:
        raise CoefficientError(f"Cannot build coefficients at slot {t}: {error}") from error

    primary_tx = engine.transmissions(engine.primary, table, slots)
    pointing = engine.pointing(engine.primary, table, slots, users)
    overhead = engine.secondary.snapshots.overhead(t)

    clusters, satellites, capacity, rows = [], [], [], []
    for cluster in range(len(engine.grid)):
        for satellite in overhead.per_cluster[cluster].tolist():
            clusters.append(cluster)
            satellites.append(satellite)
            rows.append(engine.candidate_inr(satellite, cluster, slots, users, pointing))
            capacity.append(engine.cluster_capacity(satellite, cluster, slots, primary_tx))

    logger.debug(
        f"Slot {t}: {len(clusters)} candidates over {len(engine.grid)} clusters, "
        f"{len(primary_tx)} primary transmissions"
    )
    return coefficient_table(
        t,
        len(engine.grid),
        clusters,
        satellites,
        capacity,
        np.array(rows).reshape(len(rows), len(slots), len(users)),
        handover_period,
        keep_slot_inr,
    )
