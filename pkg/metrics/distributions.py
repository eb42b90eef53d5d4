import logging

import numpy as np
import pandas
from more_itertools import run_length

from association.sources import UNSERVED
from metrics.rates import MetricsError

logger = logging.getLogger(__name__)

CDF_COLUMNS = ["value", "fraction"]
LIFETIME_COLUMNS = ["system", "cluster", "sat_id", "start_s", "duration_s", "complete"]


def empirical_cdf(samples) -> pandas.DataFrame:
    """Empirical CDF of a sample pool, one row per distinct value.

    fraction is the share of samples at or below value, so the last row
    always reads 1. A pool of linear zeros converted to dB shows up as -inf.
    """
    samples = np.asarray(samples, dtype=float).ravel()
    if np.any(np.isnan(samples)):
        raise MetricsError("Cannot build a CDF from NaN samples")
    if samples.size == 0:
        return pandas.DataFrame(columns=CDF_COLUMNS)
    values, counts = np.unique(samples, return_counts=True)
    return pandas.DataFrame({"value": values, "fraction": np.cumsum(counts) / samples.size})


def association_lifetimes(table, system_tag: str, slot_duration: float, start_slot: int = 0) -> pandas.DataFrame:
    """How long each satellite-cluster pairing lasts in a (T, N_G) serving table.

    Runs touching either end of the table are marked incomplete since their
    true length is unknown. Unserved stretches are left out.
    """
    table = np.asarray(table, dtype=int)
    if table.ndim != 2:
        raise MetricsError(f"Expected a (slots, clusters) serving table, got shape {table.shape}")
    slots = table.shape[0]
    rows = []
    for cluster in range(table.shape[1]):
        start = 0
        for satellite, length in run_length.encode(table[:, cluster].tolist()):
            if satellite != UNSERVED:
                complete = start > 0 and start + length < slots
                rows.append(
                    (
                        system_tag,
                        cluster,
                        satellite,
                        round((start_slot + start) * slot_duration, 6),
                        round(length * slot_duration, 6),
                        complete,
                    )
                )
            start += length
    logger.debug(f"{len(rows)} {system_tag} association runs over {slots} slots")
    return pandas.DataFrame(rows, columns=LIFETIME_COLUMNS)


def lifetime_histogram(lifetimes: pandas.DataFrame, bin_s: float = 10.0) -> pandas.DataFrame:
    """Counts of complete association runs per duration bin, by system."""
    complete = lifetimes[lifetimes["complete"].astype(bool)]
    if complete.empty:
        return pandas.DataFrame(columns=["system", "bin_start_s", "count"])
    bins = (np.floor(complete["duration_s"].to_numpy(dtype=float) / bin_s) * bin_s).round(6)
    return (
        complete.assign(bin_start_s=bins)
        .groupby(["system", "bin_start_s"])
        .size()
        .reset_index(name="count")
    )
