import logging
from typing import List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from association.beams import BeamSchedule
from association.grid import CellGrid, UserSet
from association.sources import UNSERVED, PrimaryAssociationSource
from linkbudget.interference import (
    DEFAULT_CHUNK_SLOTS,
    Transmission,
    served_snr_db,
    transmission_inr,
)
from linkbudget.links import capacity_sum
from linkbudget.params import LinkParams, LinkSample, SystemLink, db_to_linear
from orbits.geometry import min_elevation, unit
from orbits.snapshots import SnapshotCache

logger = logging.getLogger(__name__)


class SystemModel(NamedTuple):
    """What the engine needs to know about one constellation."""

    link: SystemLink
    snapshots: SnapshotCache
    schedule: BeamSchedule

    @property
    def eps_min(self) -> float:
        return self.snapshots.eps_min


class LinkState(NamedTuple):
    """Per-slot link quality of a set of users, all (T, U) and linear."""

    served: np.ndarray
    snr: np.ndarray
    inr: np.ndarray

    @property
    def sinr(self) -> np.ndarray:
        return np.where(self.served, self.snr / (1.0 + self.inr), 0.0)


def check_link_state(state: LinkState, table: np.ndarray, users: UserSet, slots) -> LinkState:
    """Raises LinkBudgetError naming the first negative or non-finite SNR or INR."""
    slots = np.asarray(slots, dtype=int)
    for values in (state.snr, state.inr):
        bad = ~(np.isfinite(values) & (values >= 0))
        if bad.any():
            row, column = np.argwhere(bad)[0]
            serving = int(table[row, users.clusters[column]])
            LinkSample.checked(
                values[row, column],
                users.user_ids[column],
                None if serving == UNSERVED else serving,
                None,
                slots[row],
            )
    return state


class LinkEngine:
    """Evaluates INR, SNR and capacity over windows of slots.

    Both systems share the grid and the link parameters; the primary
    association over any window comes from primary_source.
    """

    def __init__(
        self,
        grid: CellGrid,
        link: LinkParams,
        primary: SystemModel,
        secondary: SystemModel,
        primary_source: PrimaryAssociationSource,
        chunk_slots: int = DEFAULT_CHUNK_SLOTS,
    ):
        self.grid = grid
        self.link = link
        self.primary = primary
        self.secondary = secondary
        self.primary_source = primary_source
        self.chunk_slots = chunk_slots

    def __repr__(self):
        return f"<LinkEngine {self.grid!r}>"

    def visible(self, system: SystemModel, positions: np.ndarray, cluster: int) -> np.ndarray:
        return min_elevation(self.grid.cells[cluster], positions) >= system.eps_min

    def transmission(
        self,
        system: SystemModel,
        satellite: int,
        cluster: int,
        slots,
        serving: Optional[np.ndarray] = None,
    ) -> Transmission:
        """One satellite lighting one cluster over the slots.

        Args:
            serving: optional (T,) mask of the slots the pair is associated;
                every slot when omitted.
        """
        slots = np.asarray(slots, dtype=int)
        positions = system.snapshots.track([satellite], slots)[:, 0]
        beam_cells = system.schedule.active_matrix(slots)
        active = self.visible(system, positions, cluster)
        if serving is not None:
            active = active & serving
        return Transmission(
            system.link,
            int(satellite),
            int(cluster),
            positions,
            beam_cells,
            self.grid.cells[cluster][beam_cells],
            self.grid.colors[cluster][beam_cells],
            active,
        )

    def transmissions(self, system: SystemModel, table: np.ndarray, slots) -> List[Transmission]:
        """Every pair of a (T, N_G) serving table, clusters in priority order."""
        found = []
        for cluster in self.grid.priority_order:
            column = table[:, cluster]
            for satellite in np.unique(column[column != UNSERVED]):
                found.append(
                    self.transmission(system, int(satellite), cluster, slots, column == satellite)
                )
        return found

    def primary_table(self, slots) -> np.ndarray:
        return self.primary_source.serving_table(slots)

    def pointing(
        self, system: SystemModel, table: np.ndarray, slots, users: UserSet
    ) -> np.ndarray:
        """(T, U, 3) unit boresights: toward each user's server, zenith if unserved."""
        slots = np.asarray(slots, dtype=int)
        pointing = np.repeat(unit(users.positions)[None], len(slots), axis=0)
        serving = table[:, users.clusters]
        satellites = np.unique(serving[serving != UNSERVED])
        if len(satellites) == 0:
            return pointing
        tracks = system.snapshots.track(satellites, slots)
        for j, satellite in enumerate(satellites):
            mask = serving == satellite
            toward = unit(tracks[:, j][:, None, :] - users.positions[None])
            pointing[mask] = toward[mask]
        return pointing

    def interference(
        self,
        transmissions: Sequence[Transmission],
        users: UserSet,
        pointing: np.ndarray,
        victim: SystemModel,
    ) -> np.ndarray:
        """(T, U) aggregate INR, summed in the order of transmissions."""
        inr = np.zeros(pointing.shape[:2])
        for transmission in transmissions:
            inr += transmission_inr(
                transmission,
                users.positions,
                users.colors,
                pointing,
                self.link,
                victim.link,
                self.chunk_slots,
            )
        return inr

    def candidate_inr(
        self, satellite: int, cluster: int, slots, users: UserSet, pointing: np.ndarray
    ) -> np.ndarray:
        """(T, U) INR a secondary satellite serving a cluster inflicts on primary users."""
        transmission = self.transmission(self.secondary, satellite, cluster, slots)
        return transmission_inr(
            transmission,
            users.positions,
            users.colors,
            pointing,
            self.link,
            self.primary.link,
            self.chunk_slots,
        )

    def service(
        self, system: SystemModel, transmissions: Sequence[Transmission], users: UserSet, slots
    ) -> Tuple[np.ndarray, np.ndarray]:
        """Which users a system's transmissions light, and their SNR (linear)."""
        slots = len(np.asarray(slots))
        served = np.zeros((slots, len(users)), dtype=bool)
        snr = np.zeros((slots, len(users)))
        for transmission in transmissions:
            members = np.flatnonzero(users.clusters == transmission.cluster)
            if len(members) == 0:
                continue
            lit = (users.cells[members][None, :, None] == transmission.beam_cells[:, None, :]).any(
                axis=-1
            ) & transmission.active[:, None]
            if not lit.any():
                continue
            cells = self.grid.cells[transmission.cluster][users.cells[members]]
            snr_db = served_snr_db(
                transmission.positions,
                np.broadcast_to(cells, (slots,) + cells.shape),
                np.broadcast_to(users.positions[members], (slots, len(members), 3)),
                self.link,
                system.link,
            )
            served[:, members] |= lit
            snr[:, members] = np.where(lit, db_to_linear(snr_db), snr[:, members])
        return served, snr

    def link_state(
        self,
        victim: SystemModel,
        table: np.ndarray,
        own: Sequence[Transmission],
        interferers: Sequence[Transmission],
        users: UserSet,
        slots,
    ) -> LinkState:
        """SNR of users served by own and INR from the other system's transmissions."""
        pointing = self.pointing(victim, table, slots, users)
        served, snr = self.service(victim, own, users, slots)
        state = LinkState(served, snr, self.interference(interferers, users, pointing, victim))
        return check_link_state(state, table, users, slots)

    def secondary_user_sinr(
        self, satellite: int, cluster: int, slots, primary_tx: Sequence[Transmission]
    ) -> Tuple[np.ndarray, np.ndarray]:
        """SINR of the cell-centre users the candidate would light, and its visibility.

        Returns:
            (T, N_B) linear SINR and a (T,) mask of slots above eps_min.
        """
        transmission = self.transmission(self.secondary, satellite, cluster, slots)
        receivers = transmission.targets
        pointing = unit(transmission.positions[:, None, :] - receivers)
        snr = db_to_linear(
            served_snr_db(transmission.positions, receivers, receivers, self.link, self.secondary.link)
        )
        inr = np.zeros(receivers.shape[:2])
        for interferer in primary_tx:
            inr += transmission_inr(
                interferer,
                receivers,
                transmission.beam_colors,
                pointing,
                self.link,
                self.secondary.link,
                self.chunk_slots,
            )
        return snr / (1.0 + inr), transmission.active

    def cluster_capacity(
        self,
        satellite: int,
        cluster: int,
        slots,
        primary_tx: Optional[Sequence[Transmission]] = None,
    ) -> float:
        """Sum of log2(1 + SINR) the candidate would deliver over the window."""
        if primary_tx is None:
            primary_tx = self.transmissions(self.primary, self.primary_table(slots), slots)
        sinr, visible = self.secondary_user_sinr(satellite, cluster, slots, primary_tx)
        return capacity_sum(sinr, None, visible)
