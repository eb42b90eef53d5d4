import logging
import math
from typing import Dict, List, NamedTuple, Optional, Sequence

import numpy as np

from association.matrix import AssociationMatrix, check_association
from orbits.constants import SECONDARY
from solver.coefficients import CoeffTable
from solver.lagrangian import (
    MEAN,
    NOT_SERVED,
    WORST,
    Multipliers,
    SolverConfig,
    Thresholds,
    best_candidates,
    candidate_scores,
    compute_subgradients,
    dual_value,
    update_multipliers,
)
from solver.repair import RepairCache

logger = logging.getLogger(__name__)


class HandoverSolution(NamedTuple):
    """Outcome of one handover decision.

    best_dual is the smallest certified upper bound seen; published_dual the
    smallest value of the per-cluster worst-user dual, which need not bound
    the optimum when several users are protected. discarded_duals counts
    published dual values below the best feasible objective.
    """

    t: int
    association: AssociationMatrix
    selection: np.ndarray
    objective: float
    best_dual: float
    published_dual: float
    discarded_duals: int
    iterations: int
    converged: bool
    feasible: bool
    outage: List[int]
    multipliers: Multipliers

    def as_dict(self) -> Dict:
        return {
            "t": self.t,
            "primal_value": self.objective,
            "dual_bound": self.best_dual,
            "published_dual": self.published_dual,
            # worst-user penalty value; not an upper bound on the optimum
            "published_dual_certified": False,
            "discarded_duals": self.discarded_duals,
            "iterations": self.iterations,
            "converged": self.converged,
            "feasible": self.feasible,
            "outage_clusters": list(self.outage),
            "satellites": [None if s is None else int(s) for s in self.association.satellites],
            "lambda": self.multipliers.lam,
            "mu": self.multipliers.mu,
        }


def _association(selection: np.ndarray, coeffs: CoeffTable, system_tag: str) -> AssociationMatrix:
    return check_association(
        AssociationMatrix(
            tuple(None if k == NOT_SERVED else int(coeffs.satellites[k]) for k in selection),
            system_tag,
        )
    )


def solve_handover(
    coeffs: CoeffTable,
    thresholds: Thresholds,
    order: Sequence[int],
    cfg: Optional[SolverConfig] = None,
    system_tag: str = SECONDARY,
) -> HandoverSolution:
    """Subgradient iterations with primal repair at every iterate.

    Multipliers start at zero. Each iterate's scores drive a greedy repair;
    the best feasible repair over all iterates is returned, so the first one
    is the plain max-capacity priority greedy.
    """
    cfg = cfg or SolverConfig()
    multipliers = Multipliers.zeros(coeffs)
    repair = RepairCache(coeffs, thresholds, order)
    feasible = thresholds.average >= 0

    best = repair(coeffs.capacity)
    best_dual = math.inf
    published_dual = math.inf
    published_values = []
    converged = False
    iterations = 0

    for k in range(1, cfg.max_iterations + 1):
        iterations = k
        scores = candidate_scores(coeffs, multipliers, WORST)
        relaxed = best_candidates(coeffs, scores)
        published = dual_value(relaxed, multipliers, coeffs, thresholds, WORST)
        published_values.append(published)
        published_dual = min(published_dual, published)

        certified_scores = candidate_scores(coeffs, multipliers, MEAN)
        certified = dual_value(
            best_candidates(coeffs, certified_scores), multipliers, coeffs, thresholds, MEAN
        )
        best_dual = min(best_dual, certified)

        repaired = repair(scores)
        if repaired.objective > best.objective:
            best = repaired

        logger.debug(
            f"Slot {coeffs.t} iteration {k}: dual {published:.6g} certified {certified:.6g} "
            f"primal {best.objective:.6g} lambda {multipliers.lam:.6g} mu {multipliers.mu:.6g}"
        )

        if feasible and best_dual - best.objective <= cfg.tolerance * max(1.0, abs(best.objective)):
            converged = True
            break

        updated = update_multipliers(
            multipliers, compute_subgradients(relaxed, coeffs, thresholds), k, cfg
        )
        moved = max(
            abs(updated.lam - multipliers.lam),
            abs(updated.mu - multipliers.mu),
            float(np.abs(updated.nu - multipliers.nu).max()) if len(updated.nu) else 0.0,
        )
        multipliers = updated
        if moved <= cfg.tolerance:
            converged = True
            break

    if not converged and cfg.max_iterations:
        logger.warning(
            f"Slot {coeffs.t}: no convergence after {iterations} iterations "
            f"(primal {best.objective:.6g}, dual bound {best_dual:.6g})"
        )

    association = _association(best.selection, coeffs, system_tag)
    outage = association.unserved()
    discarded = sum(1 for value in published_values if value < best.objective)
    if outage:
        logger.info(f"Slot {coeffs.t}: outage in clusters {outage}")
    return HandoverSolution(
        coeffs.t,
        association,
        best.selection,
        best.objective,
        best_dual,
        published_dual,
        discarded,
        iterations,
        converged,
        feasible,
        outage,
        multipliers,
    )
