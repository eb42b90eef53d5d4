"""Ground/satellite geometry on a spherical Earth."""
from typing import NamedTuple, Sequence, Tuple

import numpy as np

from orbits.constants import EARTH_RADIUS_M


class GeometryError(ValueError):
    """Base error for module"""


class OverheadSets(NamedTuple):
    per_cluster: Tuple[np.ndarray, ...]
    union: np.ndarray

    def members(self, cluster: int) -> np.ndarray:
        return self.per_cluster[cluster]


def geodetic_to_ecef(lat_deg, lon_deg, altitude_m=0.0) -> np.ndarray:
    lat, lon = np.radians(lat_deg), np.radians(lon_deg)
    radius = EARTH_RADIUS_M + np.asarray(altitude_m, dtype=float)
    return np.stack(
        [
            radius * np.cos(lat) * np.cos(lon),
            radius * np.cos(lat) * np.sin(lon),
            radius * np.sin(lat) * np.ones_like(lon),
        ],
        axis=-1,
    )


def unit(vectors: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(vectors, axis=-1, keepdims=True)
    return vectors / norms


def elevation_angle(ground, sat) -> float:
    """Elevation of sat above the local horizontal plane at ground, in degrees.

    Raises:
        GeometryError: if ground sits at the Earth's centre or coincides with sat.
    """
    ground = np.asarray(ground, dtype=float)
    sat = np.asarray(sat, dtype=float)
    if not np.linalg.norm(ground) > 0:
        raise GeometryError("Ground point cannot be the origin")
    line_of_sight = sat - ground
    distance = np.linalg.norm(line_of_sight)
    if not distance > 0:
        raise GeometryError("Satellite and ground point coincide")
    sine = np.dot(line_of_sight, ground) / (distance * np.linalg.norm(ground))
    return float(np.degrees(np.arcsin(np.clip(sine, -1.0, 1.0))))


def elevation_table(grounds: np.ndarray, sats: np.ndarray) -> np.ndarray:
    """Elevations for every (satellite, ground point) pair.

    Args:
        grounds: (G, 3) ground points.
        sats: (..., N, 3) satellite positions.

    Returns:
        (..., N, G) elevations in degrees.
    """
    up = unit(grounds)
    line_of_sight = sats[..., :, None, :] - grounds
    distance = np.linalg.norm(line_of_sight, axis=-1)
    sine = np.einsum("...ngk,gk->...ng", line_of_sight, up) / distance
    return np.degrees(np.arcsin(np.clip(sine, -1.0, 1.0)))


def min_elevation(cells: np.ndarray, sats: np.ndarray) -> np.ndarray:
    """Worst-cell elevation of each satellite over a cluster, shape (..., N)."""
    return elevation_table(cells, sats).min(axis=-1)


def overhead_from_positions(
    positions: np.ndarray, cluster_cells: np.ndarray, eps_min: float
) -> OverheadSets:
    """Overhead sets from a position array.

    Args:
        positions: (N, 3) satellite positions at one slot.
        cluster_cells: (N_G, N_C, 3) cell centres; cell 0 is the cluster centre.
        eps_min: minimum elevation in degrees.
    """
    # The centre is itself a cell, so its elevation bounds the cluster minimum.
    centre_elevations = elevation_table(cluster_cells[:, 0], positions)
    per_cluster = []
    for cluster, cells in enumerate(cluster_cells):
        survivors = np.flatnonzero(centre_elevations[:, cluster] >= eps_min)
        if len(survivors):
            worst = min_elevation(cells, positions[survivors])
            survivors = survivors[worst >= eps_min]
        per_cluster.append(survivors)
    union = (
        np.unique(np.concatenate(per_cluster)) if per_cluster else np.array([], int)
    )
    return OverheadSets(tuple(per_cluster), union.astype(int))


def overhead_sets(states: Sequence, grid, eps_min: float) -> OverheadSets:
    """Per-cluster sets of satellites at or above eps_min over every cell.

    Args:
        states: SatelliteState records of one system at one slot.
        grid: a CellGrid.
        eps_min: minimum elevation in degrees.

    Returns:
        OverheadSets holding satellite ids (as found in the states).
    """
    ids = np.array([state.satellite_id for state in states], dtype=int)
    positions = np.array([state.position for state in states], dtype=float)
    found = overhead_from_positions(positions, grid.cells, eps_min)
    per_cluster = tuple(ids[members] for members in found.per_cluster)
    return OverheadSets(per_cluster, ids[found.union])
