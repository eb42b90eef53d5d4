from typing import Any, Dict, Optional

from celery.utils.log import get_task_logger

from project.celery import app
from scenarios.export import export_results, jsonable
from scenarios.loader import load_scenario
from scenarios.simulation import run_simulation

logger = get_task_logger(__name__)


@app.task(acks_late=True)
def run_scenario(
    scenario: Optional[str], overrides: Dict[str, Any], out_dir: str, overwrite: bool = False
) -> Dict[str, Any]:
    """Loads, runs and exports one scenario; returns its summary.

    Args:
        scenario: scenario file path or preset name.
        overrides: dotted key paths to values applied over the file.
        out_dir: directory the artefacts go to.
    """
    logger.info(f"Running {scenario or 'default preset'} with {overrides} into {out_dir}")
    result = run_simulation(load_scenario(scenario, overrides))
    export_results(result, out_dir, overwrite)
    summary = result.summary()
    summary["out_dir"] = out_dir
    return jsonable(summary)
