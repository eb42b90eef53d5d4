from functools import lru_cache

import numpy as np

from orbits.constants import EARTH_ROTATION_RATE
from orbits.geometry import OverheadSets, min_elevation, overhead_from_positions
from orbits.walker import Constellation, orbital_period, positions_at


class SnapshotCache:
    """Per-slot positions and overhead sets of one system over one grid.

    The simulation loop, the association policies and the coefficient builder
    all look at the same slots, so snapshots are memoised here.
    """

    def __init__(
        self,
        constellation: Constellation,
        cluster_cells: np.ndarray,
        eps_min: float,
        slot_duration: float,
        earth_rotation: float = EARTH_ROTATION_RATE,
        maxsize: int = 512,
    ):
        self.constellation = constellation
        self.cluster_cells = cluster_cells
        self.eps_min = eps_min
        self.slot_duration = slot_duration
        self.earth_rotation = earth_rotation
        self.positions = lru_cache(maxsize=maxsize)(self._positions)
        self.overhead = lru_cache(maxsize=maxsize)(self._overhead)

    @property
    def system_tag(self) -> str:
        return self.constellation.system_tag

    def _positions(self, slot: int) -> np.ndarray:
        return positions_at(
            self.constellation,
            slot,
            self.slot_duration,
            earth_rotation=self.earth_rotation,
        )

    def _overhead(self, slot: int) -> OverheadSets:
        return overhead_from_positions(
            self.positions(slot), self.cluster_cells, self.eps_min
        )

    def track(self, satellites, slots) -> np.ndarray:
        """(len(slots), len(satellites), 3) positions of a satellite subset."""
        return positions_at(
            self.constellation,
            np.asarray(slots),
            self.slot_duration,
            indices=np.asarray(satellites, dtype=int),
            earth_rotation=self.earth_rotation,
        )

    def visible(self, satellite: int, cluster: int, slots) -> np.ndarray:
        """Whether the satellite clears eps_min over every cell of the cluster."""
        track = self.track([satellite], slots)[:, 0]
        return min_elevation(self.cluster_cells[cluster], track) >= self.eps_min

    def lookahead_slots(self) -> int:
        """One orbital period of the highest shell, in slots."""
        top = max(shell.altitude for shell in self.constellation.shells)
        return int(np.ceil(orbital_period(top) / self.slot_duration))
