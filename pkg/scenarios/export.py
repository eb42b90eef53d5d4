"""Writes the artefacts of a run into its own directory.

Nothing time-dependent goes into the files, so rerunning a scenario with the
same seed reproduces them byte for byte.
"""
import json
import logging
import math
from pathlib import Path
from typing import Dict, List, Union

import numpy as np
import pandas

from metrics.distributions import lifetime_histogram
from scenarios.simulation import LINK_TRACE_COLUMNS, SimulationResult

logger = logging.getLogger(__name__)

SUMMARY_FILE = "summary.json"
HANDOVER_FILE = "handover_diagnostics.json"


class ExportError(Exception):
    """Writing results failed; path names the file or directory involved."""

    def __init__(self, message: str, path: Union[str, Path]):
        self.path = Path(path)
        super().__init__(f"{path}: {message}")


def jsonable(value):
    """Plain JSON types; infinities become the strings "inf" and "-inf"."""
    if isinstance(value, dict):
        return {str(key): jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [jsonable(item) for item in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return None if math.isnan(value) else value
    return value


def write_json(path: Path, payload) -> None:
    path.write_text(json.dumps(jsonable(payload), indent=2, sort_keys=True) + "\n")


def result_tables(result: SimulationResult) -> Dict[str, pandas.DataFrame]:
    report = result.report
    lifetimes = result.lifetimes
    return {
        "violation_rate.csv": report.violation_rate,
        "utilization.csv": report.utilization,
        "per_user_violation.csv": report.per_user_violation,
        "inr_cdf.csv": report.inr_cdf(),
        "sinr_cdf.csv": report.sinr_cdf(),
        "violation_report.csv": result.window.violations,
        "window_gaps.csv": result.window.gaps,
        "association_trace.csv": result.associations,
        "lifetimes.csv": lifetimes,
        "lifetime_histogram.csv": lifetime_histogram(lifetimes),
        "link_trace.csv": (
            result.link_trace
            if result.link_trace is not None
            else pandas.DataFrame(columns=LINK_TRACE_COLUMNS)
        ),
    }


def export_results(result: SimulationResult, out_dir: Union[str, Path], overwrite: bool = False) -> List[Path]:
    """Writes every CSV and JSON artefact of a run.

    Raises:
        ExportError: if out_dir exists and overwrite is off, or on any I/O error.
    """
    out = Path(out_dir)
    if out.exists():
        if not out.is_dir():
            raise ExportError("exists and is not a directory", out)
        if not overwrite:
            raise ExportError("already exists; pass overwrite to replace its files", out)

    written = []
    try:
        out.mkdir(parents=True, exist_ok=True)
        for name, frame in result_tables(result).items():
            frame.to_csv(out / name, index=False)
            written.append(out / name)
        write_json(out / HANDOVER_FILE, result.handovers)
        write_json(out / SUMMARY_FILE, result.summary())
        written.extend([out / HANDOVER_FILE, out / SUMMARY_FILE])
    except OSError as error:
        raise ExportError(error.strerror or str(error), error.filename or out) from error

    logger.info(f"Wrote {len(written)} files to {out}")
    return written
