"""Walker-Delta constellation construction and circular-orbit propagation."""
import logging
from typing import List, NamedTuple, Optional, Sequence

import numpy as np
import pandas

from orbits.constants import (
    EARTH_RADIUS_M,
    EARTH_ROTATION_RATE,
    MU_EARTH,
    PRIMARY_SHELL_TABLE,
    SECONDARY_SHELL_TABLE,
    SYSTEM_TAGS,
)

logger = logging.getLogger(__name__)

POSITION_COLUMNS = ["time_s", "sat_id", "system", "x_m", "y_m", "z_m"]


class ConstellationError(ValueError):
    """Base error for module"""


class ShellParams(NamedTuple):
    altitude: float  # km
    inclination: float  # deg
    num_planes: int
    sats_per_plane: int
    # None means the Walker default: 1, or 0 for a single-plane shell.
    phasing_factor: Optional[int] = None
    raan_offset: float = 0.0  # deg
    anomaly_offset: float = 0.0  # deg

    @property
    def size(self) -> int:
        return self.num_planes * self.sats_per_plane

    @property
    def phasing(self) -> int:
        if self.phasing_factor is None:
            return 1 if self.num_planes > 1 else 0
        return self.phasing_factor

    def problems(self) -> List[str]:
        found = []
        if not self.altitude > 0:
            found.append(f"altitude must be positive, got {self.altitude} km")
        if not 0 <= self.inclination <= 180:
            found.append(f"inclination must lie in [0, 180], got {self.inclination}")
        if self.num_planes < 1:
            found.append(f"num_planes must be at least 1, got {self.num_planes}")
        if self.sats_per_plane < 1:
            found.append(
                f"sats_per_plane must be at least 1, got {self.sats_per_plane}"
            )
        if self.num_planes >= 1 and not 0 <= self.phasing < self.num_planes:
            found.append(
                f"phasing_factor must lie in [0, {self.num_planes}), got {self.phasing}"
            )
        return found


class SatelliteState(NamedTuple):
    satellite_id: int
    position: np.ndarray  # ECEF metres
    system_tag: str


class Constellation:
    """Per-satellite orbital elements of one system.

    Elements are stored as flat arrays indexed by satellite id; satellites are
    numbered shell by shell, plane by plane.
    """

    def __init__(
        self,
        system_tag: str,
        shells: Sequence[ShellParams],
        shell_index: np.ndarray,
        raan: np.ndarray,
        anomaly: np.ndarray,
        epoch: float = 0.0,
    ):
        self.system_tag = system_tag
        self.shells = tuple(shells)
        self.shell_index = shell_index
        self.raan = raan
        self.anomaly = anomaly
        self.epoch = epoch

        altitudes = np.array([shell.altitude for shell in self.shells]) * 1e3
        inclinations = np.radians([shell.inclination for shell in self.shells])
        self.radius = EARTH_RADIUS_M + altitudes[shell_index]
        self.inclination = inclinations[shell_index]
        self.mean_motion = np.sqrt(MU_EARTH / self.radius ** 3)

    def __len__(self):
        return len(self.shell_index)

    def __repr__(self):
        return f"<Constellation {self.system_tag}: {len(self)} satellites in {len(self.shells)} shells>"

    @property
    def top_altitude(self) -> float:
        """Highest shell altitude, in metres."""
        return max(shell.altitude for shell in self.shells) * 1e3

    @property
    def bottom_altitude(self) -> float:
        return min(shell.altitude for shell in self.shells) * 1e3

    def shell_counts(self) -> List[int]:
        return np.bincount(self.shell_index, minlength=len(self.shells)).tolist()


def orbital_period(altitude: float) -> float:
    """Circular orbital period in seconds for an altitude in kilometres."""
    radius = EARTH_RADIUS_M + altitude * 1e3
    return 2 * np.pi * np.sqrt(radius ** 3 / MU_EARTH)


def build_walker_delta(
    shells: Sequence[ShellParams], system_tag: str, epoch: float = 0.0
) -> Constellation:
    """Lays out every shell in Walker-Delta fashion.

    Planes are equally spaced in RAAN over 360 degrees, satellites equally
    spaced in mean anomaly within a plane, and plane p is phased by
    p * F * 360 / (total satellites in the shell).

    Raises:
        ConstellationError: for zero counts, bad geometry or an unknown tag.
    """
    if system_tag not in SYSTEM_TAGS:
        raise ConstellationError(f"Unknown system tag {system_tag!r}")
    if not shells:
        raise ConstellationError("A constellation needs at least one shell")

    problems = [
        f"shell {index}: {problem}"
        for index, shell in enumerate(shells)
        for problem in shell.problems()
    ]
    if problems:
        raise ConstellationError("; ".join(problems))

    shell_index, raan, anomaly = [], [], []
    for index, shell in enumerate(shells):
        planes = np.repeat(np.arange(shell.num_planes), shell.sats_per_plane)
        slots = np.tile(np.arange(shell.sats_per_plane), shell.num_planes)
        shell_index.append(np.full(shell.size, index))
        raan.append(shell.raan_offset + planes * 360.0 / shell.num_planes)
        anomaly.append(
            shell.anomaly_offset
            + slots * 360.0 / shell.sats_per_plane
            + planes * shell.phasing * 360.0 / shell.size
        )

    constellation = Constellation(
        system_tag,
        shells,
        np.concatenate(shell_index),
        np.mod(np.concatenate(raan), 360.0),
        np.mod(np.concatenate(anomaly), 360.0),
        epoch=epoch,
    )
    logger.debug(f"Built {constellation!r}")
    return constellation


def randomize_epoch(
    shells: Sequence[ShellParams], rng: np.random.Generator
) -> List[ShellParams]:
    """Draws a uniform RAAN and anomaly offset for every shell."""
    return [
        shell._replace(
            raan_offset=float(rng.uniform(0.0, 360.0)),
            anomaly_offset=float(rng.uniform(0.0, 360.0)),
        )
        for shell in shells
    ]


def reference_shells(system_tag: str) -> List[ShellParams]:
    table = {
        "primary": PRIMARY_SHELL_TABLE,
        "secondary": SECONDARY_SHELL_TABLE,
    }[system_tag]
    return [ShellParams(*row) for row in table]


def positions_at(
    constellation: Constellation,
    slots,
    slot_duration: float,
    indices=None,
    earth_rotation: float = EARTH_ROTATION_RATE,
) -> np.ndarray:
    """ECEF positions for many slots at once.

    Args:
        constellation: the system to propagate.
        slots: a slot index or an array of them; must be non-negative.
        slot_duration: seconds per slot.
        indices: optional subset of satellite ids.
        earth_rotation: rotation rate in rad/s; 0 keeps ECEF aligned with ECI.

    Returns:
        Array of shape (len(slots), len(indices), 3) in metres, or
        (len(indices), 3) for a scalar slot.
    """
    scalar = np.ndim(slots) == 0
    slots = np.atleast_1d(np.asarray(slots))
    if np.any(slots < 0):
        raise ConstellationError("Slots must be non-negative")
    if indices is None:
        indices = slice(None)

    times = slots.astype(float) * slot_duration
    radius = constellation.radius[indices]
    inclination = constellation.inclination[indices]
    raan = np.radians(constellation.raan[indices])
    anomaly0 = np.radians(constellation.anomaly[indices])
    motion = constellation.mean_motion[indices]

    u = anomaly0[None, :] + motion[None, :] * (times[:, None] - constellation.epoch)
    cos_u, sin_u = np.cos(u), np.sin(u)
    cos_raan, sin_raan = np.cos(raan)[None, :], np.sin(raan)[None, :]
    cos_inc, sin_inc = np.cos(inclination)[None, :], np.sin(inclination)[None, :]

    x = radius * (cos_raan * cos_u - sin_raan * sin_u * cos_inc)
    y = radius * (sin_raan * cos_u + cos_raan * sin_u * cos_inc)
    z = radius * (sin_u * sin_inc)

    theta = (earth_rotation * times)[:, None]
    cos_t, sin_t = np.cos(theta), np.sin(theta)
    positions = np.stack([cos_t * x + sin_t * y, -sin_t * x + cos_t * y, z], axis=-1)
    return positions[0] if scalar else positions


def propagate_ecef(
    constellation: Constellation,
    t: int,
    slot_duration: float,
    earth_rotation: float = EARTH_ROTATION_RATE,
) -> List[SatelliteState]:
    """Every satellite's ECEF position at slot t."""
    if t < 0:
        raise ConstellationError(f"Slot must be non-negative, got {t}")
    positions = positions_at(
        constellation, t, slot_duration, earth_rotation=earth_rotation
    )
    return [
        SatelliteState(satellite_id, position, constellation.system_tag)
        for satellite_id, position in enumerate(positions)
    ]


def positions_frame(
    constellation: Constellation,
    slots,
    slot_duration: float,
    earth_rotation: float = EARTH_ROTATION_RATE,
) -> pandas.DataFrame:
    """One row per (slot, satellite) in the positions dump format."""
    slots = np.asarray(slots, dtype=int)
    positions = positions_at(constellation, slots, slot_duration, earth_rotation=earth_rotation)
    count = len(constellation)
    flat = positions.reshape(-1, 3)
    return pandas.DataFrame(
        {
            "time_s": np.repeat(np.round(slots * slot_duration, 6), count),
            "sat_id": np.tile(np.arange(count), len(slots)),
            "system": constellation.system_tag,
            "x_m": flat[:, 0],
            "y_m": flat[:, 1],
            "z_m": flat[:, 2],
        },
        columns=POSITION_COLUMNS,
    )
