import logging

import numpy as np

from association.grid import CELLS_PER_CLUSTER, GridError

logger = logging.getLogger(__name__)

STANDARD_BEAM_COUNTS = (8, 16, 24, 32)


def check_beam_count(n_beams: int, cells: int = CELLS_PER_CLUSTER) -> int:
    if not 1 <= n_beams <= cells:
        raise GridError(f"Beam count must lie in [1, {cells}], got {n_beams}")
    if n_beams not in STANDARD_BEAM_COUNTS:
        logger.warning(f"Beam count {n_beams} is not one of {STANDARD_BEAM_COUNTS}")
    return n_beams


def schedule_beams(
    cluster: int, satellite: int, n_beams: int, slot: int, cells: int = CELLS_PER_CLUSTER
) -> np.ndarray:
    """Cells lit by the serving satellite of a cluster at a slot.

    The same rotation applies to every (satellite, cluster) pair, so both
    systems light the same cell indices at the same slot.
    """
    check_beam_count(n_beams, cells)
    return BeamSchedule(n_beams, cells).active(slot)


class BeamSchedule:
    """Round-robin spot-beam rotation: slot k lights cells (k*N_B + j) mod N_C."""

    def __init__(self, n_beams: int, cells: int = CELLS_PER_CLUSTER):
        if not 1 <= n_beams <= cells:
            raise GridError(f"Beam count must lie in [1, {cells}], got {n_beams}")
        self.n_beams = n_beams
        self.cells = cells

    def __repr__(self):
        return f"<BeamSchedule {self.n_beams} of {self.cells}>"

    @property
    def cycle(self) -> int:
        """Slots needed to light every cell at least once."""
        return -(-self.cells // self.n_beams)

    def active(self, slot: int) -> np.ndarray:
        return self.active_matrix([slot])[0]

    def active_matrix(self, slots) -> np.ndarray:
        """(len(slots), N_B) active cell indices."""
        slots = np.asarray(slots, dtype=np.int64)
        if self.n_beams >= self.cells:
            return np.broadcast_to(np.arange(self.cells), (len(slots), self.cells))
        return np.mod(slots[:, None] * self.n_beams + np.arange(self.n_beams), self.cells)
