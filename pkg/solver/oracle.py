"""Exhaustive search over associations, for validating the solver on small instances."""
import itertools
import logging
import math
from typing import NamedTuple

import numpy as np

from association.matrix import AssociationMatrix
from orbits.constants import SECONDARY
from solver.coefficients import CoeffTable
from solver.lagrangian import NOT_SERVED, SolverError, Thresholds

logger = logging.getLogger(__name__)

ENUMERATION_BUDGET = 10 ** 6


class OracleBudgetExceeded(SolverError):
    """The instance has more candidate combinations than the oracle will enumerate."""


class OracleResult(NamedTuple):
    selection: np.ndarray
    objective: float
    association: AssociationMatrix
    enumerated: int


def is_feasible(selection, coeffs: CoeffTable, thresholds: Thresholds) -> bool:
    """Whether a selection meets both protection constraints and the matching rules."""
    selection = np.asarray(selection, dtype=int)
    chosen = selection[selection != NOT_SERVED]
    satellites = coeffs.satellites[chosen]
    if len(set(satellites.tolist())) != len(satellites):
        return False
    if np.any(coeffs.clusters[chosen] != np.flatnonzero(selection != NOT_SERVED)):
        return False
    if thresholds.average < 0:
        return False
    if not len(chosen) or not coeffs.users:
        return True
    if coeffs.avg_inr[chosen].sum(axis=0).max() > thresholds.average:
        return False
    if math.isfinite(thresholds.absolute):
        rows = coeffs.slot_inr if coeffs.slot_inr is not None else coeffs.peak_inr[:, None, :]
        if rows[chosen].sum(axis=0).max() > thresholds.absolute:
            return False
    return True


def brute_force_oracle(
    coeffs: CoeffTable,
    thresholds: Thresholds,
    budget: int = ENUMERATION_BUDGET,
    system_tag: str = SECONDARY,
) -> OracleResult:
    """Highest-capacity feasible association by enumeration.

    Every cluster is tried unserved and with each of its candidates. Among
    equal objectives the first combination enumerated wins.

    Raises:
        OracleBudgetExceeded: if the number of combinations exceeds budget.
    """
    choices = [
        [NOT_SERVED] + coeffs.of_cluster(cluster).tolist() for cluster in range(coeffs.n_clusters)
    ]
    combinations = math.prod(len(options) for options in choices)
    if combinations > budget:
        raise OracleBudgetExceeded(f"{combinations} combinations exceed the budget of {budget}")

    best = np.full(coeffs.n_clusters, NOT_SERVED, dtype=int)
    best_value = 0.0 if thresholds.average >= 0 else -math.inf
    for combination in itertools.product(*choices):
        selection = np.array(combination, dtype=int)
        chosen = selection[selection != NOT_SERVED]
        value = float(coeffs.capacity[chosen].sum())
        if value <= best_value:
            continue
        if is_feasible(selection, coeffs, thresholds):
            best, best_value = selection, value

    satellites = tuple(
        None if k == NOT_SERVED else int(coeffs.satellites[k]) for k in best
    )
    logger.debug(f"Oracle enumerated {combinations} combinations, optimum {best_value}")
    return OracleResult(best, max(best_value, 0.0), AssociationMatrix(satellites, system_tag), combinations)
