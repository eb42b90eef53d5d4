"""Parameter grids run as one Celery task per point.

Every point writes into its own directory under the sweep directory; the
headline numbers of all points are gathered into sweep_summary.csv.
"""
import logging
import math
from pathlib import Path
from typing import Any, Dict, List, NamedTuple, Optional, Tuple, Union

import pandas

from scenarios.export import ExportError
from scenarios.schema import BASELINE, POLICY_NAMES, PROTECTED
from scenarios.tasks import run_scenario

logger = logging.getLogger(__name__)

SWEEP_SUMMARY_FILE = "sweep_summary.csv"
SUMMARY_KEYS = [
    "mean_violation_rate",
    "max_violation_rate",
    "mean_utilization",
    "outage_handovers",
    "fraction_above_reference",
    "users_below_5pct_violation",
    "window_avg_violations",
    "window_abs_violations",
    "infeasible_handovers",
    "unconverged_handovers",
]

# Absolute thresholds swept under each protected time-average level, plus
# further time-average levels with the absolute constraint off (dB).
PROTECTED_AVERAGES = (-6.0, -12.2)
MAX_THRESHOLDS = (-6.0, -3.0, 0.0, 3.0, math.inf)
AVERAGE_THRESHOLDS = (-12.2, -10.0, -6.0, 0.0)
HANDOVER_PERIODS_S = (5.0, 10.0, 15.0, 20.0, 25.0, 30.0)
ABSOLUTE_THRESHOLDS = (-6.0, 0.0, math.inf)
WINDOWS_S = (0.0, 5.0, 10.0, 20.0)
BEAM_COUNTS = (8, 16, 24, 32)


class SweepPoint(NamedTuple):
    label: str
    overrides: Dict[str, Any]


def _db(value: float) -> str:
    return "inf" if math.isinf(value) else f"{value:g}"


def threshold_pairs() -> List[Tuple[float, float]]:
    """(time-average, absolute) threshold pairs of the threshold sweep, in dB."""
    pairs = [(avg, peak) for avg in PROTECTED_AVERAGES for peak in MAX_THRESHOLDS]
    pairs.extend((avg, math.inf) for avg in AVERAGE_THRESHOLDS if avg not in PROTECTED_AVERAGES)
    return pairs


def threshold_points() -> List[SweepPoint]:
    return [
        SweepPoint(
            f"avg{_db(avg)}_max{_db(peak)}",
            {"mode": PROTECTED, "protection.inr_avg_th_db": avg, "protection.inr_max_th_db": peak},
        )
        for avg, peak in threshold_pairs()
    ]


def handover_points() -> List[SweepPoint]:
    return [
        SweepPoint(
            f"th{period:g}_max{_db(peak)}",
            {
                "mode": PROTECTED,
                "protection.inr_avg_th_db": -6.0,
                "protection.inr_max_th_db": peak,
                "protection.th_s": period,
                "protection.tw_s": 10.0,
            },
        )
        for peak in ABSOLUTE_THRESHOLDS
        for period in HANDOVER_PERIODS_S
    ]


def window_points() -> List[SweepPoint]:
    return [
        SweepPoint(
            f"th{period:g}_tw{window:g}",
            {
                "mode": PROTECTED,
                "protection.inr_avg_th_db": -12.2,
                "protection.inr_max_th_db": math.inf,
                "protection.th_s": period,
                "protection.tw_s": window,
            },
        )
        for window in WINDOWS_S
        for period in HANDOVER_PERIODS_S
    ]


def beam_points() -> List[SweepPoint]:
    return [
        SweepPoint(
            f"{mode}_{policy}_beams{beams}",
            {"mode": mode, "secondary.policy": policy, "beams": beams},
        )
        for beams in BEAM_COUNTS
        for mode, policy in [(BASELINE, name) for name in POLICY_NAMES] + [(PROTECTED, POLICY_NAMES[0])]
    ]


SWEEPS = {
    "thresholds": threshold_points,
    "handover": handover_points,
    "window": window_points,
    "beams": beam_points,
}


def sweep_points(name: str) -> List[SweepPoint]:
    try:
        return SWEEPS[name]()
    except KeyError:
        raise ValueError(f"Unknown sweep {name!r}; choose from {', '.join(SWEEPS)}")


def summary_row(label: str, overrides: Dict[str, Any], summary: Dict[str, Any]) -> Dict[str, Any]:
    row = {"point": label}
    row.update({key: _db(value) if isinstance(value, float) else value for key, value in overrides.items()})
    row.update({key: summary.get(key) for key in SUMMARY_KEYS})
    return row


def run_sweep(
    name: str,
    scenario: Optional[str],
    out_dir: Union[str, Path],
    base_overrides: Optional[Dict[str, Any]] = None,
    overwrite: bool = False,
) -> pandas.DataFrame:
    """Dispatches every point of a sweep and collects sweep_summary.csv.

    Points run in-process when Celery is eager, otherwise on the simulations
    queue in parallel.

    Raises:
        ExportError: the sweep directory exists without overwrite, or the
            summary cannot be written.
    """
    out = Path(out_dir)
    if out.exists() and not overwrite:
        raise ExportError("already exists; pass overwrite to replace its files", out)
    points = sweep_points(name)
    logger.info(f"Sweep {name}: {len(points)} points into {out}")

    pending = []
    for point in points:
        overrides = dict(base_overrides or {}, **point.overrides)
        pending.append(
            (point, overrides, run_scenario.delay(scenario, overrides, str(out / point.label), overwrite))
        )
    rows = [summary_row(point.label, overrides, task.get()) for point, overrides, task in pending]

    frame = pandas.DataFrame(rows)
    try:
        out.mkdir(parents=True, exist_ok=True)
        frame.to_csv(out / SWEEP_SUMMARY_FILE, index=False)
    except OSError as error:
        raise ExportError(error.strerror or str(error), error.filename or out) from error
    return frame
