"""Violation rates and utilization of a run."""
import numpy as np

from association.matrix import AssociationMatrix
from linkbudget.params import db_to_linear


class MetricsError(ValueError):
    """Base error for module"""


def _checked(samples) -> np.ndarray:
    samples = np.asarray(samples, dtype=float)
    if np.any(np.isnan(samples)):
        raise MetricsError("INR samples cannot be NaN")
    return samples


def violation_rate(inr, threshold_db: float) -> float:
    """Fraction of users whose linear INR at one slot is strictly above threshold_db."""
    inr = _checked(inr)
    if inr.size == 0:
        return 0.0
    return float(np.mean(inr > db_to_linear(threshold_db)))


def violation_rate_series(trace, threshold_db: float) -> np.ndarray:
    """Per-slot violation rate of a (T, U) linear INR trace."""
    trace = _checked(trace)
    if trace.ndim != 2:
        raise MetricsError(f"Expected a (slots, users) trace, got shape {trace.shape}")
    if trace.shape[1] == 0:
        return np.zeros(trace.shape[0])
    return np.mean(trace > db_to_linear(threshold_db), axis=1)


def per_user_violation(trace, threshold_db: float) -> np.ndarray:
    """Per-user fraction of slots with INR strictly above threshold_db."""
    trace = _checked(trace)
    if trace.ndim != 2:
        raise MetricsError(f"Expected a (slots, users) trace, got shape {trace.shape}")
    if trace.shape[0] == 0:
        return np.zeros(trace.shape[1])
    return np.mean(trace > db_to_linear(threshold_db), axis=0)


def exceedance(samples_db, threshold_db: float) -> float:
    """Fraction of dB samples strictly above threshold_db."""
    samples_db = _checked(samples_db)
    if samples_db.size == 0:
        return 0.0
    return float(np.mean(samples_db > threshold_db))


def utilization(association: AssociationMatrix) -> float:
    """Fraction of clusters the association serves."""
    if len(association) == 0:
        return 0.0
    return association.served() / len(association)
