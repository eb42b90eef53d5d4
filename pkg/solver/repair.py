from typing import Dict, NamedTuple, Sequence, Tuple

import numpy as np

from solver.coefficients import CoeffTable
from solver.lagrangian import NOT_SERVED, Thresholds, primal_objective


class Accumulator:
    """Running interference of the candidates accepted so far.

    The absolute check uses per-slot rows when the table has them and the
    per-user peaks (a conservative stand-in) otherwise.
    """

    def __init__(self, coeffs: CoeffTable, thresholds: Thresholds):
        self.coeffs = coeffs
        self.thresholds = thresholds
        self.check_absolute = np.isfinite(thresholds.absolute)
        self.average = np.zeros(coeffs.users)
        rows = coeffs.slot_inr if coeffs.slot_inr is not None else coeffs.peak_inr[:, None, :]
        self._rows = rows
        self.absolute = np.zeros(rows.shape[1:])

    def fits(self, k: int) -> bool:
        if np.any(self.average + self.coeffs.avg_inr[k] > self.thresholds.average):
            return False
        if self.check_absolute and np.any(self.absolute + self._rows[k] > self.thresholds.absolute):
            return False
        return True

    def add(self, k: int) -> None:
        self.average = self.average + self.coeffs.avg_inr[k]
        self.absolute = self.absolute + self._rows[k]


class Repaired(NamedTuple):
    selection: np.ndarray  # per cluster candidate index or NOT_SERVED
    objective: float


def repair(
    coeffs: CoeffTable, scores: np.ndarray, thresholds: Thresholds, order: Sequence[int]
) -> Repaired:
    """Greedy feasible association guided by Lagrangian scores.

    Clusters in priority order take their best-scoring candidate that has
    positive capacity, uses a free satellite and keeps every user within both
    thresholds. Ties go to the lowest satellite id.
    """
    selection = np.full(coeffs.n_clusters, NOT_SERVED, dtype=int)
    if thresholds.average < 0:
        return Repaired(selection, 0.0)
    accumulator = Accumulator(coeffs, thresholds)
    used = set()
    for cluster in order:
        members = coeffs.of_cluster(cluster)
        for k in members[np.lexsort((coeffs.satellites[members], -scores[members]))]:
            satellite = int(coeffs.satellites[k])
            if coeffs.capacity[k] <= 0 or satellite in used:
                continue
            if not accumulator.fits(k):
                continue
            accumulator.add(k)
            used.add(satellite)
            selection[cluster] = k
            break
    return Repaired(selection, primal_objective(selection, coeffs))


class RepairCache:
    """Remembers repairs by the candidate ranking they were driven by."""

    def __init__(self, coeffs: CoeffTable, thresholds: Thresholds, order: Sequence[int]):
        self.coeffs = coeffs
        self.thresholds = thresholds
        self.order = list(order)
        self._seen: Dict[Tuple[int, ...], Repaired] = {}
        self.hits = 0

    def __call__(self, scores: np.ndarray) -> Repaired:
        key = tuple(np.lexsort((self.coeffs.satellites, -scores, self.coeffs.clusters)).tolist())
        if key in self._seen:
            self.hits += 1
            return self._seen[key]
        repaired = repair(self.coeffs, scores, self.thresholds, self.order)
        self._seen[key] = repaired
        return repaired
