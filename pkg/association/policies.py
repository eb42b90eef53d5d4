"""Handover policies: highest elevation (HE) and maximum contact time (MCT).

Both policies walk the clusters in priority order, so a satellite that is the
best choice for several clusters ends up with the highest-priority one and the
others fall back to their next-best candidate.
"""
import logging
from typing import Callable, Dict, Optional, Sequence

import numpy as np

from association.grid import CellGrid
from association.matrix import AssociationMatrix, check_association
from orbits.geometry import elevation_table, min_elevation
from orbits.snapshots import SnapshotCache

logger = logging.getLogger(__name__)

HIGHEST_ELEVATION = "he"
MAX_CONTACT_TIME = "mct"


def priority_greedy(
    preferences: Sequence[Sequence[int]], order: Sequence[int], taken=()
) -> list:
    """Each cluster, in order, takes its first preferred satellite still free.

    Args:
        preferences: per cluster, candidate satellites best first.
        order: cluster indices from highest to lowest priority.
        taken: satellites unavailable from the start.

    Returns:
        Per cluster satellite id or None.
    """
    taken = set(taken)
    chosen = [None] * len(preferences)
    for cluster in order:
        for satellite in preferences[cluster]:
            if satellite not in taken:
                chosen[cluster] = int(satellite)
                taken.add(satellite)
                break
    return chosen


def assign_highest_elevation(
    snapshots: SnapshotCache,
    grid: CellGrid,
    prev: Optional[AssociationMatrix],
    t: int,
) -> AssociationMatrix:
    """Re-associates every cluster with its highest-elevation overhead satellite.

    Elevation is measured at the cluster centre; ties go to the lowest
    satellite id. prev is ignored: HE starts from scratch at every handover.
    """
    overhead = snapshots.overhead(t)
    positions = snapshots.positions(t)
    preferences = []
    for cluster, candidates in enumerate(overhead.per_cluster):
        if len(candidates) == 0:
            preferences.append([])
            continue
        elevations = elevation_table(grid.centers[cluster : cluster + 1], positions[candidates])[:, 0]
        preferences.append(candidates[np.lexsort((candidates, -elevations))].tolist())

    chosen = priority_greedy(preferences, grid.priority_order)
    matrix = check_association(AssociationMatrix(tuple(chosen), snapshots.system_tag))
    logger.debug(f"HE {snapshots.system_tag} at slot {t}: {matrix.satellites}")
    return matrix


def contact_slots(
    snapshots: SnapshotCache,
    candidates: Sequence[int],
    cluster: int,
    t: int,
    horizon: int,
    chunk: int = 256,
) -> np.ndarray:
    """Slots each candidate stays above eps_min over the cluster, counted from t.

    Capped at horizon; the track is propagated chunk by chunk and stops once
    every candidate has set.
    """
    candidates = np.asarray(candidates, dtype=int)
    cells = snapshots.cluster_cells[cluster]
    remaining = np.full(len(candidates), horizon, dtype=int)
    alive = np.ones(len(candidates), dtype=bool)
    for start in range(t, t + horizon, chunk):
        slots = np.arange(start, min(start + chunk, t + horizon))
        idx = np.flatnonzero(alive)
        track = snapshots.track(candidates[idx], slots)
        up = min_elevation(cells, track) >= snapshots.eps_min
        ended = ~up.all(axis=0)
        first_down = np.argmax(~up, axis=0)
        remaining[idx[ended]] = (start - t) + first_down[ended]
        alive[idx[ended]] = False
        if not alive.any():
            break
    return remaining


def assign_max_contact_time(
    snapshots: SnapshotCache,
    grid: CellGrid,
    prev: Optional[AssociationMatrix],
    t: int,
) -> AssociationMatrix:
    """Keeps each serving satellite until it is about to set, then replaces it.

    A cluster hands over at slot t when its satellite is below eps_min at t or
    t + 1. The replacement is the free overhead satellite with the longest
    remaining contact (lookahead capped at one orbital period); ties go to the
    lowest id and contested candidates to the higher-priority cluster.
    """
    clusters = len(grid)
    satellites = list(prev.satellites) if prev is not None else [None] * clusters
    for cluster, satellite in enumerate(satellites):
        if satellite is not None and not snapshots.visible(satellite, cluster, [t, t + 1]).all():
            logger.debug(f"MCT {snapshots.system_tag}: cluster {cluster} leaves {satellite} at slot {t}")
            satellites[cluster] = None

    if all(satellite is not None for satellite in satellites):
        return AssociationMatrix(tuple(satellites), snapshots.system_tag)

    overhead = snapshots.overhead(t)
    taken = {satellite for satellite in satellites if satellite is not None}
    horizon = snapshots.lookahead_slots()
    for cluster in grid.priority_order:
        if satellites[cluster] is not None:
            continue
        candidates = [m for m in overhead.per_cluster[cluster].tolist() if m not in taken]
        if not candidates:
            continue
        contact = contact_slots(snapshots, candidates, cluster, t, horizon)
        satellites[cluster] = candidates[int(np.argmax(contact))]
        taken.add(satellites[cluster])

    return check_association(AssociationMatrix(tuple(satellites), snapshots.system_tag))


POLICIES: Dict[str, Callable] = {
    HIGHEST_ELEVATION: assign_highest_elevation,
    MAX_CONTACT_TIME: assign_max_contact_time,
}


def baseline_secondary_assign(
    policy: str,
    snapshots: SnapshotCache,
    grid: CellGrid,
    prev: Optional[AssociationMatrix],
    t: int,
) -> AssociationMatrix:
    """Unprotected secondary association: the primary's policies, applied as is."""
    return POLICIES[policy](snapshots, grid, prev, t)
