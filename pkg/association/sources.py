"""Where the primary system's associations come from.

The simulator only needs "which satellite serves which cluster at slot t".
A policy simulation answers that today; a recorded trace (or a learned
predictor emitting the same trace format) can answer it instead.
"""
import logging
from pathlib import Path
from typing import Dict, List, Union

import numpy as np
import pandas

from association.grid import CellGrid
from association.matrix import AssociationMatrix, check_association
from association.policies import HIGHEST_ELEVATION, POLICIES
from orbits.snapshots import SnapshotCache

logger = logging.getLogger(__name__)

TRACE_COLUMNS = ["time_s", "system", "cluster", "sat_id"]
UNSERVED = -1


class SourceCoverageError(LookupError):
    """The source cannot say who serves a cluster at some slot."""


class PrimaryAssociationSource:
    system_tag: str
    clusters: int

    def association_at(self, slot: int) -> AssociationMatrix:
        raise NotImplementedError

    def associations(self, slots) -> List[AssociationMatrix]:
        return [self.association_at(int(slot)) for slot in slots]

    def serving_table(self, slots) -> np.ndarray:
        """(len(slots), N_G) serving satellite ids, UNSERVED where nobody serves."""
        return np.array(
            [
                [UNSERVED if s is None else s for s in matrix.satellites]
                for matrix in self.associations(slots)
            ],
            dtype=int,
        ).reshape(len(slots), self.clusters)


class PolicyAssociationSource(PrimaryAssociationSource):
    """Simulates HE or MCT lazily and remembers every answer.

    HE re-associates at every multiple of period. MCT is evaluated slot by
    slot since each decision depends on the previous one.
    """

    def __init__(
        self, snapshots: SnapshotCache, grid: CellGrid, policy: str, period: int
    ):
        if policy not in POLICIES:
            raise ValueError(f"Unknown policy {policy!r}")
        self.snapshots = snapshots
        self.grid = grid
        self.policy = policy
        self.period = period
        self.system_tag = snapshots.system_tag
        self.clusters = len(grid)
        self._handovers: Dict[int, AssociationMatrix] = {}
        self._sequence: List[AssociationMatrix] = []

    def __repr__(self):
        return f"<PolicyAssociationSource {self.system_tag} {self.policy}>"

    def association_at(self, slot: int) -> AssociationMatrix:
        if slot < 0:
            raise SourceCoverageError(f"No association before slot 0 (asked {slot})")
        if self.policy == HIGHEST_ELEVATION:
            start = slot - slot % self.period
            if start not in self._handovers:
                self._handovers[start] = POLICIES[self.policy](
                    self.snapshots, self.grid, None, start
                )
            return self._handovers[start]

        while len(self._sequence) <= slot:
            t = len(self._sequence)
            prev = self._sequence[-1] if self._sequence else None
            self._sequence.append(POLICIES[self.policy](self.snapshots, self.grid, prev, t))
        return self._sequence[slot]


class TraceAssociationSource(PrimaryAssociationSource):
    """Replays an association trace (time_s, system, cluster, sat_id).

    sat_id is UNSERVED (-1) for an unserved cluster. Clusters missing from a
    slot's rows are unserved as well; a slot with no rows at all is a gap.
    """

    def __init__(
        self,
        trace: Union[str, Path, pandas.DataFrame],
        grid: CellGrid,
        system_tag: str,
        slot_duration: float,
    ):
        frame = trace if isinstance(trace, pandas.DataFrame) else pandas.read_csv(trace)
        missing = set(TRACE_COLUMNS) - set(frame.columns)
        if missing:
            raise SourceCoverageError(f"Association trace lacks columns {sorted(missing)}")
        frame = frame[frame["system"] == system_tag]
        self.system_tag = system_tag
        self.clusters = len(grid)
        self._by_slot: Dict[int, AssociationMatrix] = {}
        slots = np.rint(frame["time_s"].to_numpy() / slot_duration).astype(int)
        for slot, rows in frame.assign(slot=slots).groupby("slot"):
            satellites = [None] * len(grid)
            for cluster, sat_id in zip(rows["cluster"], rows["sat_id"]):
                if not 0 <= cluster < len(grid):
                    raise SourceCoverageError(f"Trace names unknown cluster {cluster}")
                satellites[int(cluster)] = None if sat_id == UNSERVED else int(sat_id)
            self._by_slot[int(slot)] = check_association(
                AssociationMatrix(tuple(satellites), system_tag)
            )
        logger.info(f"Loaded {len(self._by_slot)} {system_tag} association slots from trace")

    def association_at(self, slot: int) -> AssociationMatrix:
        try:
            return self._by_slot[slot]
        except KeyError:
            raise SourceCoverageError(
                f"{self.system_tag} association trace does not cover slot {slot}"
            )


def association_frame(
    matrices: List[AssociationMatrix], slots, slot_duration: float
) -> pandas.DataFrame:
    """Rows of the association trace format, one per (slot, cluster)."""
    rows = [
        (round(slot * slot_duration, 6), matrix.system_tag, cluster, UNSERVED if sat is None else sat)
        for slot, matrix in zip(slots, matrices)
        for cluster, sat in enumerate(matrix.satellites)
    ]
    return pandas.DataFrame(rows, columns=TRACE_COLUMNS)
