"""Lagrangian relaxation of the protective association problem.

The two protection constraints (worst-user horizon average and worst
(user, slot) absolute INR) and the one-cluster-per-satellite constraint are
moved into the objective with multipliers lambda, mu and nu. What remains
separates into one pick-at-most-one-satellite problem per cluster.
"""
import logging
import math
from typing import List, NamedTuple, Optional

import numpy as np

from solver.coefficients import CoeffTable

logger = logging.getLogger(__name__)

PUBLISHED = "published"
DESCENT = "descent"
MULTIPLIER_RULES = (PUBLISHED, DESCENT)

WORST = "worst"
MEAN = "mean"

NOT_SERVED = -1


class SolverError(ValueError):
    """Base error for module"""


class Thresholds(NamedTuple):
    """Linear thresholds of one handover: effective average and absolute."""

    average: float
    absolute: float = math.inf


class Multipliers(NamedTuple):
    lam: float
    mu: float
    nu: np.ndarray  # one per distinct candidate satellite, CoeffTable.satellite_ids order

    @classmethod
    def zeros(cls, coeffs: CoeffTable) -> "Multipliers":
        return cls(0.0, 0.0, np.zeros(len(coeffs.satellite_ids)))

    def is_valid(self) -> bool:
        return self.lam >= 0 and self.mu >= 0 and bool(np.all(self.nu >= 0))


class Subgradients(NamedTuple):
    lam: float
    mu: float
    nu: np.ndarray


class SolverConfig(NamedTuple):
    """Iteration budget and step schedule step(k) = a / (b + k)."""

    max_iterations: int = 200
    step_a: float = 1.0
    step_b: float = 10.0
    tolerance: float = 1e-6
    lambda_scale: float = 1.0
    mu_scale: float = 1.0
    nu_scale: float = 1.0
    multiplier_rule: str = PUBLISHED

    def step(self, k: int) -> float:
        return self.step_a / (self.step_b + k)

    def problems(self) -> List[str]:
        found = []
        if not self.step_a > 0:
            found.append(f"step_a must be positive, got {self.step_a}")
        if self.step_b < 0:
            found.append(f"step_b cannot be negative, got {self.step_b}")
        if self.max_iterations < 0:
            found.append(f"max_iterations cannot be negative, got {self.max_iterations}")
        if self.tolerance < 0:
            found.append(f"tolerance cannot be negative, got {self.tolerance}")
        for name in ("lambda_scale", "mu_scale", "nu_scale"):
            if getattr(self, name) < 0:
                found.append(f"{name} cannot be negative, got {getattr(self, name)}")
        if self.multiplier_rule not in MULTIPLIER_RULES:
            found.append(f"multiplier_rule must be one of {MULTIPLIER_RULES}, got {self.multiplier_rule!r}")
        return found


def validate_solver_config(cfg: SolverConfig) -> SolverConfig:
    problems = cfg.problems()
    if problems:
        raise SolverError("; ".join(problems))
    return cfg


def candidate_scores(coeffs: CoeffTable, multipliers: Multipliers, penalty: str = WORST) -> np.ndarray:
    """Lagrangian score of every candidate.

    With penalty=WORST each candidate is charged for its own worst user, the
    per-cluster score as published. With penalty=MEAN it is charged its mean
    over users instead; that never overstates the coupled constraints, so the
    resulting dual value is a valid upper bound.
    """
    if penalty == WORST:
        avg, slot = coeffs.worst_avg, coeffs.worst_slot
    elif penalty == MEAN:
        avg, slot = coeffs.mean_avg, coeffs.mean_slot
    else:
        raise SolverError(f"Unknown penalty {penalty!r}")
    scores = coeffs.capacity - multipliers.nu[coeffs.satellite_index]
    if multipliers.lam:
        scores = scores - multipliers.lam * avg
    if multipliers.mu:
        scores = scores - multipliers.mu * slot
    return scores


def best_candidates(coeffs: CoeffTable, scores: np.ndarray) -> np.ndarray:
    """Per cluster the candidate with the highest positive score, or NOT_SERVED.

    Ties go to the lowest satellite id.
    """
    selection = np.full(coeffs.n_clusters, NOT_SERVED, dtype=int)
    for cluster in range(coeffs.n_clusters):
        members = coeffs.of_cluster(cluster)
        if len(members) == 0:
            continue
        ranked = members[np.lexsort((coeffs.satellites[members], -scores[members]))]
        if scores[ranked[0]] > 0:
            selection[cluster] = ranked[0]
    return selection


def cluster_subproblem(
    cluster: int, coeffs: CoeffTable, multipliers: Multipliers, penalty: str = WORST
) -> Optional[int]:
    """Satellite maximising the cluster's Lagrangian score, None if no score is positive."""
    members = coeffs.of_cluster(cluster)
    if len(members) == 0:
        return None
    scores = candidate_scores(coeffs, multipliers, penalty)[members]
    ranked = np.lexsort((coeffs.satellites[members], -scores))
    best = ranked[0]
    return int(coeffs.satellites[members[best]]) if scores[best] > 0 else None


def _chosen(selection) -> np.ndarray:
    selection = np.asarray(selection, dtype=int)
    return selection[selection != NOT_SERVED]


def primal_objective(selection, coeffs: CoeffTable) -> float:
    return float(coeffs.capacity[_chosen(selection)].sum())


def dual_value(
    selection,
    multipliers: Multipliers,
    coeffs: CoeffTable,
    thresholds: Thresholds,
    penalty: str = WORST,
) -> float:
    """Lagrangian of a selection: its scores plus the multiplier-weighted thresholds.

    A multiplier at zero contributes nothing even against an infinite threshold.
    """
    value = float(candidate_scores(coeffs, multipliers, penalty)[_chosen(selection)].sum())
    if multipliers.lam:
        value += multipliers.lam * thresholds.average
    if multipliers.mu:
        value += multipliers.mu * thresholds.absolute
    return value + float(multipliers.nu.sum())


def compute_subgradients(selection, coeffs: CoeffTable, thresholds: Thresholds) -> Subgradients:
    """Slack of each relaxed constraint at the selection."""
    chosen = _chosen(selection)
    if coeffs.users and len(chosen):
        worst_avg = float(coeffs.avg_inr[chosen].sum(axis=0).max())
        if coeffs.slot_inr is not None:
            worst_slot = float(coeffs.slot_inr[chosen].sum(axis=0).max())
        else:
            worst_slot = float(coeffs.peak_inr[chosen].sum(axis=0).max())
    else:
        worst_avg = worst_slot = 0.0
    counts = np.bincount(coeffs.satellite_index[chosen], minlength=len(coeffs.satellite_ids))
    return Subgradients(
        thresholds.average - worst_avg,
        thresholds.absolute - worst_slot,
        1.0 - counts,
    )


def update_multipliers(
    multipliers: Multipliers, subgradients: Subgradients, k: int, cfg: SolverConfig
) -> Multipliers:
    """One projected step at iteration k (k >= 1).

    PUBLISHED adds step * subgradient; DESCENT subtracts it. A multiplier
    whose subgradient is not finite (an infinite threshold) is held at zero.
    """
    step = cfg.step(k)
    scales = (cfg.lambda_scale, cfg.mu_scale, cfg.nu_scale)
    if step < 0 or min(scales) < 0:
        raise SolverError(f"Step sizes must be non-negative, got {step} at iteration {k}")
    sign = 1.0 if cfg.multiplier_rule == PUBLISHED else -1.0

    def advance(value, slope, scale):
        if not np.all(np.isfinite(slope)):
            return np.zeros_like(value) if np.ndim(value) else 0.0
        return np.maximum(0.0, value + sign * scale * step * slope)

    return Multipliers(
        float(advance(multipliers.lam, subgradients.lam, cfg.lambda_scale)),
        float(advance(multipliers.mu, subgradients.mu, cfg.mu_scale)),
        advance(multipliers.nu, np.asarray(subgradients.nu, dtype=float), cfg.nu_scale),
    )
