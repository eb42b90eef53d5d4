"""Small deterministic scenes for the fast test suites.

Satellites sit on equatorial shells with Earth rotation disabled, and the
clusters straddle the equator, so every geometric fact in a test can be
worked out by hand.
"""
import math
from pathlib import Path
from typing import Sequence, Tuple

import numpy as np

from association.beams import BeamSchedule
from association.grid import CellGrid, RegionConfig, build_grid
from association.sources import PolicyAssociationSource
from linkbudget.engine import LinkEngine, SystemModel
from linkbudget.params import LinkParams, SystemLink
from orbits.constants import PRIMARY, SECONDARY
from orbits.snapshots import SnapshotCache
from orbits.walker import ShellParams, build_walker_delta
from scenarios.loader import parse_scenario
from solver.coefficients import coefficient_table
from solver.lagrangian import Thresholds

SLOT_DURATION = 0.1


def equatorial_shell(altitude: float = 550.0, sats: int = 1, anomaly_offset: float = 0.0) -> ShellParams:
    return ShellParams(altitude, 0.0, 1, sats, anomaly_offset=anomaly_offset)


def tiny_grid(centers: Sequence[Tuple[float, float]] = ((0.0, 0.0),), priorities=()) -> CellGrid:
    return build_grid(RegionConfig(centers=tuple(centers), priorities=tuple(priorities)))


def tiny_system(
    system_tag: str,
    shells: Sequence[ShellParams],
    grid: CellGrid,
    eps_min: float = 25.0,
    n_beams: int = 16,
) -> SystemModel:
    constellation = build_walker_delta(shells, system_tag)
    snapshots = SnapshotCache(constellation, grid.cells, eps_min, SLOT_DURATION, earth_rotation=0.0)
    return SystemModel(
        SystemLink(system_tag, constellation.top_altitude),
        snapshots,
        BeamSchedule(n_beams, grid.cells_per_cluster),
    )


def tiny_engine(
    primary_shells: Sequence[ShellParams],
    secondary_shells: Sequence[ShellParams],
    grid: CellGrid,
    n_beams: int = 16,
    policy: str = "he",
    period: int = 150,
    link: LinkParams = LinkParams(),
) -> LinkEngine:
    primary = tiny_system(PRIMARY, primary_shells, grid, link.primary_eps_min, n_beams)
    secondary = tiny_system(SECONDARY, secondary_shells, grid, link.secondary_eps_min, n_beams)
    source = PolicyAssociationSource(primary.snapshots, grid, policy, period)
    return LinkEngine(grid, link, primary, secondary, source)


def random_instance(
    rng,
    max_satellites: int = 6,
    max_clusters: int = 3,
    max_users: int = 4,
    slots: int = 1,
):
    """A random small coefficient table and thresholds that usually bind.

    Capacity depends mostly on the satellite, so conflicts between clusters
    are common.
    """
    n_satellites = int(rng.integers(2, max_satellites + 1))
    n_clusters = int(rng.integers(1, max_clusters + 1))
    users = int(rng.integers(1, max_users + 1))
    quality = rng.uniform(1.0, 10.0, n_satellites)

    clusters, satellites = [], []
    for cluster in range(n_clusters):
        size = int(rng.integers(1, n_satellites + 1))
        for satellite in sorted(rng.choice(n_satellites, size=size, replace=False).tolist()):
            clusters.append(cluster)
            satellites.append(satellite)
    satellites = np.array(satellites)
    capacity = quality[satellites] * rng.uniform(0.97, 1.03, len(satellites))
    slot_inr = rng.exponential(1.0, size=(len(satellites), slots, users))

    table = coefficient_table(0, n_clusters, clusters, satellites, capacity, slot_inr, slots)
    average = float(rng.uniform(0.5, 2.5))
    absolute = math.inf if rng.random() < 0.5 else float(average * rng.uniform(1.0, 2.0))
    return table, Thresholds(average, absolute)


# One cluster on the equator, one primary satellite overhead and two secondary
# satellites on the opposite sides of the orbit; twenty slots, two handovers.
TINY_SCENARIO = """
name = "tiny"
duration_s = 2.0
slot_duration_s = 0.1
beams = 8
earth_rotation = false

primary {
    shells = [[550.0, 0.0, 1, 1]]
    handover_s = 1.0
}

secondary {
    shells = [[600.0, 0.0, 1, 2]]
}

region {
    centers = [[0.0, 0.0]]
}

protection {
    th_s = 1.0
    tw_s = 1.0
}

solver {
    max_iterations = 20
}
"""


def tiny_scenario(**overrides):
    """The tiny scenario with dotted keys given as double-underscore names."""
    return parse_scenario(TINY_SCENARIO, {key.replace("__", "."): value for key, value in overrides.items()})


def write_tiny_scenario(directory) -> str:
    path = Path(directory, "tiny.scenario")
    path.write_text(TINY_SCENARIO)
    return str(path)
