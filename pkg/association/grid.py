"""Hexagonal clusters of ground cells and the users placed in them."""
import logging
import math
from typing import Iterator, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from orbits.constants import EARTH_RADIUS_M
from orbits.geometry import geodetic_to_ecef

logger = logging.getLogger(__name__)

CLUSTER_RINGS = 6
CELLS_PER_CLUSTER = 3 * CLUSTER_RINGS * (CLUSTER_RINGS + 1) + 1
REUSE_COLORS = (1, 2, 3)

# Axial translation between neighbouring clusters of radius CLUSTER_RINGS.
CLUSTER_TRANSLATION = (2 * CLUSTER_RINGS + 1, -CLUSTER_RINGS)


class GridError(ValueError):
    """Base error for module"""


class RegionConfig(NamedTuple):
    clusters: int = 10
    anchor_lat: float = 31.0
    anchor_lon: float = -99.0
    cell_radius: float = 10.0  # km
    # Explicit (lat, lon) cluster centres; empty means a tiled layout.
    centers: Tuple[Tuple[float, float], ...] = ()
    # Rank per cluster, 1 = highest; empty means generation order.
    priorities: Tuple[int, ...] = ()


class Cluster(NamedTuple):
    index: int
    center_lat: float
    center_lon: float
    priority: int


class User(NamedTuple):
    user_id: int
    cluster: int
    cell: int
    position: np.ndarray
    color: int
    representative: bool


class UserSet(NamedTuple):
    """Column-wise ground users."""

    user_ids: np.ndarray
    clusters: np.ndarray
    cells: np.ndarray
    positions: np.ndarray
    colors: np.ndarray
    representative: np.ndarray

    def __len__(self):
        return len(self.user_ids)

    def users(self) -> Iterator[User]:
        for row in zip(*self):
            yield User(*row)

    def subset(self, mask) -> "UserSet":
        return UserSet(*(column[mask] for column in self))

    def merge(self, other: "UserSet") -> "UserSet":
        return UserSet(*(np.concatenate([mine, theirs]) for mine, theirs in zip(self, other)))


def hexagon_axial(rings: int = CLUSTER_RINGS) -> np.ndarray:
    """Axial (q, r) offsets of a hexagon of cells, centre first, ring by ring."""
    cells = [
        (q, r)
        for q in range(-rings, rings + 1)
        for r in range(-rings, rings + 1)
        if max(abs(q), abs(r), abs(q + r)) <= rings
    ]
    cells.sort(key=lambda c: (max(abs(c[0]), abs(c[1]), abs(c[0] + c[1])), c))
    return np.array(cells, dtype=int)


def reuse_color(axial: np.ndarray) -> np.ndarray:
    """Three-colouring where no two adjacent hexagons match."""
    return np.mod(axial[..., 0] - axial[..., 1], 3) + 1


def axial_to_planar(axial: np.ndarray, cell_radius_m: float) -> np.ndarray:
    """(east, north) metres of pointy-top hexagon centres."""
    q, r = axial[..., 0], axial[..., 1]
    east = math.sqrt(3.0) * cell_radius_m * (q + r / 2.0)
    north = 1.5 * cell_radius_m * r
    return np.stack([east, north], axis=-1)


def planar_to_ecef(anchor_lat: float, anchor_lon: float, planar: np.ndarray) -> np.ndarray:
    lat = anchor_lat + np.degrees(planar[..., 1] / EARTH_RADIUS_M)
    lon = anchor_lon + np.degrees(
        planar[..., 0] / (EARTH_RADIUS_M * math.cos(math.radians(anchor_lat)))
    )
    return geodetic_to_ecef(lat, lon)


def planar_to_latlon(anchor_lat: float, anchor_lon: float, planar) -> Tuple[float, float]:
    lat = anchor_lat + math.degrees(planar[1] / EARTH_RADIUS_M)
    lon = anchor_lon + math.degrees(
        planar[0] / (EARTH_RADIUS_M * math.cos(math.radians(anchor_lat)))
    )
    return lat, lon


def tiled_cluster_offsets(count: int) -> np.ndarray:
    """Axial centres of the first `count` clusters of a tiling, spiralling outwards."""
    a = np.array(CLUSTER_TRANSLATION)
    b = np.array([-a[1], a[0] + a[1]])  # a rotated by 60 degrees
    reach = int(math.ceil(math.sqrt(count))) + 1
    lattice = [
        i * a + j * b for i in range(-reach, reach + 1) for j in range(-reach, reach + 1)
    ]

    def spiral_key(point):
        x, y = point[0] + point[1] / 2.0, point[1] * math.sqrt(3.0) / 2.0
        return round(math.hypot(x, y), 9), round(math.atan2(y, x) % (2 * math.pi), 9)

    lattice.sort(key=spiral_key)
    return np.array(lattice[:count], dtype=int)


class CellGrid:
    """N_G clusters of 127 hexagonal cells with reuse-three colouring.

    Attributes:
        clusters: Cluster records in index order.
        cells: (N_G, N_C, 3) ECEF cell centres; cell 0 is the cluster centre.
        colors: (N_G, N_C) reuse colour of every cell.
        cell_radius: cell circumradius in km.
    """

    def __init__(
        self,
        clusters: Sequence[Cluster],
        cells: np.ndarray,
        colors: np.ndarray,
        planar: np.ndarray,
        frames: Sequence[Tuple[float, float]],
        cell_radius: float,
    ):
        self.clusters = list(clusters)
        self.cells = cells
        self.colors = colors
        self.planar = planar
        self.frames = list(frames)
        self.cell_radius = cell_radius

    def __len__(self):
        return len(self.clusters)

    def __repr__(self):
        return f"<CellGrid: {len(self)} clusters of {self.cells_per_cluster} cells>"

    @property
    def cells_per_cluster(self) -> int:
        return self.cells.shape[1]

    @property
    def total_cells(self) -> int:
        return self.cells.shape[0] * self.cells.shape[1]

    @property
    def centers(self) -> np.ndarray:
        return self.cells[:, 0]

    @property
    def priority_order(self) -> List[int]:
        """Cluster indices from highest to lowest priority."""
        return [c.index for c in sorted(self.clusters, key=lambda c: c.priority)]

    def user_id(self, cluster: int, cell: int) -> int:
        return cluster * self.cells_per_cluster + cell

    def representative_users(self) -> UserSet:
        """One user at every cell centre."""
        n_g, n_c = self.colors.shape
        clusters = np.repeat(np.arange(n_g), n_c)
        cells = np.tile(np.arange(n_c), n_g)
        return UserSet(
            clusters * n_c + cells,
            clusters,
            cells,
            self.cells.reshape(-1, 3),
            self.colors.reshape(-1),
            np.ones(n_g * n_c, dtype=bool),
        )

    def random_users(self, per_cell: int, rng: np.random.Generator) -> UserSet:
        """Users drawn uniformly inside every cell's hexagon.

        Ids continue after the representative users.
        """
        n_g, n_c = self.colors.shape
        radius = self.cell_radius * 1e3
        total = n_g * n_c * per_cell
        offsets = np.empty((0, 2))
        while len(offsets) < total:
            draw = rng.uniform(-radius, radius, size=(2 * (total - len(offsets)) + 8, 2))
            x, y = np.abs(draw[:, 0]), np.abs(draw[:, 1])
            inside = (x <= math.sqrt(3.0) / 2.0 * radius) & (
                y <= radius - x / math.sqrt(3.0)
            )
            offsets = np.concatenate([offsets, draw[inside]])
        offsets = offsets[:total].reshape(n_g, n_c, per_cell, 2)

        positions = np.stack(
            [
                planar_to_ecef(
                    *self.frames[cluster],
                    self.planar[cluster][:, None, :] + offsets[cluster],
                )
                for cluster in range(n_g)
            ]
        )
        clusters = np.repeat(np.arange(n_g), n_c * per_cell)
        cells = np.tile(np.repeat(np.arange(n_c), per_cell), n_g)
        return UserSet(
            self.total_cells + np.arange(total),
            clusters,
            cells,
            positions.reshape(-1, 3),
            self.colors[clusters, cells],
            np.zeros(total, dtype=bool),
        )


def _check_priorities(priorities: Sequence[int], count: int) -> List[int]:
    if not priorities:
        return list(range(1, count + 1))
    if sorted(priorities) != list(range(1, count + 1)):
        raise GridError(
            f"Priorities must be a permutation of 1..{count}, got {list(priorities)}"
        )
    return list(priorities)


def build_grid(region: Optional[RegionConfig] = None) -> CellGrid:
    """Lays out the clusters of a region.

    Without explicit centres, clusters tile the plane around the anchor so
    neighbouring clusters share edges and the colouring stays proper across
    them. Explicit centres each get their own local layout.

    Raises:
        GridError: for an empty region, coincident centres or bad priorities.
    """
    region = region or RegionConfig()
    if region.cell_radius <= 0:
        raise GridError(f"Cell radius must be positive, got {region.cell_radius}")
    radius_m = region.cell_radius * 1e3
    local = hexagon_axial()

    if region.centers:
        count = len(region.centers)
        frames = [tuple(center) for center in region.centers]
        axial = np.broadcast_to(local, (count,) + local.shape)
        planar = axial_to_planar(axial, radius_m)
        cells = np.stack([planar_to_ecef(*frame, planar[0]) for frame in frames])
        centre_points = cells[:, 0]
        for i in range(count):
            for j in range(i + 1, count):
                separation = np.linalg.norm(centre_points[i] - centre_points[j])
                if separation < radius_m:
                    raise GridError(
                        f"Clusters {i} and {j} share a centre ({separation / 1e3:.2f} km apart)"
                    )
                if separation < 2 * math.sqrt(3.0) * radius_m * (CLUSTER_RINGS + 0.5):
                    logger.warning(f"Clusters {i} and {j} overlap")
        centres_latlon = frames
    else:
        count = region.clusters
        if count < 1:
            raise GridError(f"A region needs at least one cluster, got {count}")
        offsets = tiled_cluster_offsets(count)
        axial = offsets[:, None, :] + local[None, :, :]
        planar = axial_to_planar(axial, radius_m)
        frames = [(region.anchor_lat, region.anchor_lon)] * count
        cells = planar_to_ecef(region.anchor_lat, region.anchor_lon, planar)
        centres_latlon = [
            planar_to_latlon(region.anchor_lat, region.anchor_lon, planar[n, 0])
            for n in range(count)
        ]

    priorities = _check_priorities(region.priorities, count)
    clusters = [
        Cluster(index, lat, lon, priorities[index])
        for index, (lat, lon) in enumerate(centres_latlon)
    ]
    grid = CellGrid(
        clusters,
        np.ascontiguousarray(cells),
        reuse_color(np.asarray(axial)),
        np.asarray(planar),
        frames,
        region.cell_radius,
    )
    logger.debug(f"Built {grid!r}")
    return grid
