import logging
import os
from pathlib import Path
from typing import Any, Dict, List, Optional

from django.conf import settings

from scenarios.grammar import parse_scenario_text
from scenarios.schema import Scenario, ScenarioError, build_scenario, read_settings

logger = logging.getLogger(__name__)

SCENARIO_SUFFIX = ".scenario"


def preset_names() -> List[str]:
    folder = Path(settings.SCENARIO_PRESET_DIR)
    if not folder.is_dir():
        return []
    return sorted(path.stem for path in folder.glob(f"*{SCENARIO_SUFFIX}"))


def resolve_scenario_path(path_or_preset: Optional[str] = None) -> Path:
    """A scenario file path, or the file of a bundled preset by name.

    Raises:
        ScenarioError: when neither exists.
    """
    name = path_or_preset or settings.SIMULATION_DEFAULT_PRESET
    if os.path.isfile(name):
        return Path(name)
    preset = Path(settings.SCENARIO_PRESET_DIR, f"{name}{SCENARIO_SUFFIX}")
    if preset.is_file():
        return preset
    raise ScenarioError(
        f"No scenario file or preset named {name!r}; presets are {', '.join(preset_names()) or 'none'}"
    )


def parse_scenario(text: str, overrides: Optional[Dict[str, Any]] = None) -> Scenario:
    """Scenario from scenario text plus dotted-path overrides."""
    return build_scenario(read_settings(parse_scenario_text(text), overrides))


def load_scenario(
    path_or_preset: Optional[str] = None, overrides: Optional[Dict[str, Any]] = None
) -> Scenario:
    """Reads, fills in and validates a scenario.

    Args:
        path_or_preset: a file path or a preset name; the default preset
            when omitted.
        overrides: dotted key paths to values, applied over the file.

    Raises:
        ScenarioParseError: the file does not follow the grammar.
        ScenarioError: unknown keys, ill-typed values or violated constraints.
    """
    path = resolve_scenario_path(path_or_preset)
    try:
        text = path.read_text()
    except OSError as error:
        raise ScenarioError(f"Cannot read {path}: {error}") from error
    scenario = parse_scenario(text, overrides)
    logger.info(
        f"Loaded scenario {scenario.name!r} from {path}: {scenario.mode} mode, "
        f"{scenario.duration:g} s, seed {scenario.seed}"
    )
    return scenario
