"""Every scenario key: its type, default and meaning.

FIELDS drives reading scenario files and command-line overrides, filling in
defaults, validating the result and rendering the reference scenario.
"""
import logging
import math
import os
import re
from typing import Any, Dict, List, NamedTuple, Optional, Tuple

from antenna.patterns import SATELLITE_TX_PATTERN, USER_RX_PATTERN, AntennaPattern
from association.beams import STANDARD_BEAM_COUNTS
from association.grid import CELLS_PER_CLUSTER, RegionConfig
from association.policies import HIGHEST_ELEVATION, MAX_CONTACT_TIME
from linkbudget.params import LinkParams
from orbits.constants import PRIMARY, SECONDARY
from orbits.walker import ShellParams, reference_shells
from protection.config import ProtectionConfig
from scenarios.grammar import Section
from solver.lagrangian import MULTIPLIER_RULES, SolverConfig

logger = logging.getLogger(__name__)

PROTECTED = "protected"
BASELINE = "baseline"
MODES = (PROTECTED, BASELINE)
POLICY_NAMES = (HIGHEST_ELEVATION, MAX_CONTACT_TIME)
REFERENCE = "reference"

# Line number given to values that come from the command line.
COMMAND_LINE = 0

INT = "int"
FLOAT = "float"
BOOL = "bool"
TEXT = "text"
CHOICE = "choice"
SHELLS = "shells"
PAIRS = "pairs"
INTS = "ints"

_LINK = LinkParams()
_REGION = RegionConfig()
_PROTECTION = ProtectionConfig()
_SOLVER = SolverConfig()


class ScenarioError(ValueError):
    """Base error for module"""


class Field(NamedTuple):
    section: str
    key: str
    kind: str
    default: Any
    help: str
    choices: Tuple[str, ...] = ()

    @property
    def path(self) -> str:
        return f"{self.section}.{self.key}" if self.section else self.key


def _pattern_fields(section: str, pattern: AntennaPattern, role: str) -> List[Field]:
    return [
        Field(section, "peak_gain_dbi", FLOAT, pattern.peak_gain, f"{role} boresight gain"),
        Field(
            section,
            "beamwidth_3db_deg",
            FLOAT,
            pattern.beamwidth_3db,
            f"{role} off-boresight angle of the half-power contour",
        ),
        Field(section, "sidelobe_floor_db", FLOAT, pattern.sidelobe_floor, "Sidelobe floor below peak"),
        Field(section, "far_floor_dbi", FLOAT, pattern.far_floor, "Absolute floor of the pattern"),
    ]


FIELDS: Tuple[Field, ...] = (
    Field("", "name", TEXT, "default", "Label echoed in every output"),
    Field("", "seed", INT, 0, "Seed of every random draw in the run"),
    Field(
        "",
        "mode",
        CHOICE,
        PROTECTED,
        "protected solves each secondary handover; baseline applies the secondary policy as is",
        MODES,
    ),
    Field("", "duration_s", FLOAT, 60.0, "Simulated time"),
    Field("", "slot_duration_s", FLOAT, 0.1, "Time step"),
    Field("", "beams", INT, 16, "Simultaneous spot beams per satellite"),
    Field("", "allow_nonstandard_beams", BOOL, False, "Accept beam counts other than 8, 16, 24 and 32"),
    Field("", "users_per_cell", INT, 0, "Uniformly drawn users per cell on top of the cell-centre users"),
    Field("", "randomize_epoch", BOOL, False, "Draw RAAN and anomaly offsets per shell from the seed"),
    Field("", "earth_rotation", BOOL, True, "Rotate the Earth under the orbits"),
    Field("", "link_trace", BOOL, False, "Write the per-slot SNR, INR and SINR of every user"),
    Field("", "chunk_slots", INT, 32, "Slots per vectorised interference block"),
    Field(
        PRIMARY,
        "shells",
        SHELLS,
        REFERENCE,
        "reference, or rows of [altitude_km, inclination_deg, planes, sats_per_plane, phasing]",
    ),
    Field(
        PRIMARY,
        "policy",
        CHOICE,
        HIGHEST_ELEVATION,
        "he (highest elevation) or mct (maximum contact time)",
        POLICY_NAMES,
    ),
    Field(PRIMARY, "handover_s", FLOAT, 15.0, "Re-association period of the he policy"),
    Field(PRIMARY, "eps_min_deg", FLOAT, _LINK.primary_eps_min, "Minimum elevation angle"),
    Field(
        PRIMARY,
        "max_eirp_dbw_hz",
        FLOAT,
        _LINK.primary_max_eirp,
        "EIRP density at nadir from the highest shell",
    ),
    Field(
        PRIMARY,
        "association_trace",
        TEXT,
        "",
        "CSV of time_s,system,cluster,sat_id replacing the policy when set",
    ),
    Field(SECONDARY, "shells", SHELLS, REFERENCE, "Same format as primary.shells"),
    Field(
        SECONDARY,
        "policy",
        CHOICE,
        HIGHEST_ELEVATION,
        "Handover policy of baseline mode",
        POLICY_NAMES,
    ),
    Field(SECONDARY, "eps_min_deg", FLOAT, _LINK.secondary_eps_min, "Minimum elevation angle"),
    Field(
        SECONDARY,
        "max_eirp_dbw_hz",
        FLOAT,
        _LINK.secondary_max_eirp,
        "EIRP density at nadir from the highest shell",
    ),
    Field("region", "clusters", INT, _REGION.clusters, "Clusters tiled around the anchor"),
    Field("region", "anchor_lat_deg", FLOAT, _REGION.anchor_lat, "Latitude of the tiling anchor"),
    Field("region", "anchor_lon_deg", FLOAT, _REGION.anchor_lon, "Longitude of the tiling anchor"),
    Field("region", "cell_radius_km", FLOAT, _REGION.cell_radius, "Hexagonal cell radius"),
    Field("region", "centers", PAIRS, (), "Explicit [lat, lon] cluster centres; empty tiles the region"),
    Field("region", "priorities", INTS, (), "Rank of each cluster, 1 first; empty keeps layout order"),
    Field("link", "carrier_ghz", FLOAT, _LINK.carrier, "Shared carrier frequency"),
    Field("link", "noise_psd_dbm_hz", FLOAT, _LINK.noise_psd, "Thermal noise density"),
    Field("link", "noise_figure_db", FLOAT, _LINK.noise_figure, "User receiver noise figure"),
    *_pattern_fields("antenna.tx", SATELLITE_TX_PATTERN, "Satellite beam"),
    *_pattern_fields("antenna.rx", USER_RX_PATTERN, "User terminal"),
    Field(
        "protection",
        "inr_avg_th_db",
        FLOAT,
        _PROTECTION.inr_avg_threshold_db,
        "Time-average INR threshold",
    ),
    Field(
        "protection",
        "inr_max_th_db",
        FLOAT,
        _PROTECTION.inr_max_threshold_db,
        "Absolute INR threshold; inf disables it",
    ),
    Field("protection", "th_s", FLOAT, 15.0, "Secondary handover period"),
    Field("protection", "tw_s", FLOAT, 10.0, "Past part of the averaging window"),
    Field("solver", "max_iterations", INT, _SOLVER.max_iterations, "Subgradient iterations per handover"),
    Field("solver", "step_a", FLOAT, _SOLVER.step_a, "Step size numerator a in a / (b + k)"),
    Field("solver", "step_b", FLOAT, _SOLVER.step_b, "Step size offset b in a / (b + k)"),
    Field("solver", "tolerance", FLOAT, _SOLVER.tolerance, "Relative duality gap and multiplier change to stop at"),
    Field("solver", "lambda_scale", FLOAT, _SOLVER.lambda_scale, "Step scale of the time-average multiplier"),
    Field("solver", "mu_scale", FLOAT, _SOLVER.mu_scale, "Step scale of the absolute multiplier"),
    Field("solver", "nu_scale", FLOAT, _SOLVER.nu_scale, "Step scale of the per-satellite multipliers"),
    Field(
        "solver",
        "multiplier_rule",
        CHOICE,
        _SOLVER.multiplier_rule,
        "published (additive update) or descent (projected subgradient descent)",
        MULTIPLIER_RULES,
    ),
)

FIELD_INDEX: Dict[str, Field] = {field.path: field for field in FIELDS}
DEFAULTS: Dict[str, Any] = {field.path: field.default for field in FIELDS}


def _parent(section: str) -> str:
    return section.rsplit(".", 1)[0] if "." in section else ""


def _sections() -> List[str]:
    found: List[str] = []
    for field in FIELDS:
        parts = field.section.split(".") if field.section else []
        for depth in range(1, len(parts) + 1):
            name = ".".join(parts[:depth])
            if name not in found:
                found.append(name)
    return found


SECTIONS = _sections()


class SystemSpec(NamedTuple):
    tag: str
    shells: Tuple[ShellParams, ...]
    policy: str
    # Re-association period of the he policy, in slots.
    handover_period: int
    association_trace: str = ""


class Scenario(NamedTuple):
    """A validated scenario. settings keeps the flat key values it came from."""

    name: str
    seed: int
    mode: str
    slot_duration: float
    duration_slots: int
    n_beams: int
    users_per_cell: int
    randomize_epoch: bool
    earth_rotation: bool
    link_trace: bool
    chunk_slots: int
    primary: SystemSpec
    secondary: SystemSpec
    region: RegionConfig
    link: LinkParams
    tx_pattern: AntennaPattern
    rx_pattern: AntennaPattern
    protection: ProtectionConfig
    solver: SolverConfig
    settings: Dict[str, Any]

    @property
    def duration(self) -> float:
        return self.duration_slots * self.slot_duration

    @property
    def handover_period(self) -> int:
        return self.protection.handover_period

    def override(self, overrides: Dict[str, Any]) -> "Scenario":
        """The same scenario with some keys replaced, given as dotted paths."""
        return build_scenario(read_settings(overrides=overrides, base=self.settings))

    def as_dict(self) -> Dict[str, Any]:
        echo: Dict[str, Any] = {}
        for field in FIELDS:
            target = echo
            for part in filter(None, field.section.split(".")):
                target = target.setdefault(part, {})
            target[field.key] = _plain(self.settings[field.path])
        return echo


def _plain(value):
    if isinstance(value, (tuple, list)):
        return [_plain(item) for item in value]
    return value


def _where(line: int) -> str:
    return "Command line" if line == COMMAND_LINE else f"Line {line}"


def _number(value) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValueError(f"expected a number, got {value!r}")
    return value


def _integer(value) -> int:
    number = _number(value)
    if isinstance(number, float) and not number.is_integer():
        raise ValueError(f"expected an integer, got {value!r}")
    return int(number)


def _rows(value) -> list:
    if not isinstance(value, list) or not all(isinstance(row, list) for row in value):
        raise ValueError(f"expected a list of lists, got {value!r}")
    return value


def _shell_row(row) -> tuple:
    if len(row) not in (4, 5):
        raise ValueError(f"a shell row has 4 or 5 entries, got {row!r}")
    altitude, inclination = float(_number(row[0])), float(_number(row[1]))
    return (altitude, inclination) + tuple(_integer(item) for item in row[2:])


def coerce(field: Field, value) -> Any:
    """Checks a raw value against the field's kind and normalises it.

    Raises:
        ValueError: describing the mismatch.
    """
    if field.kind == INT:
        return _integer(value)
    if field.kind == FLOAT:
        return float(_number(value))
    if field.kind == BOOL:
        if not isinstance(value, bool):
            raise ValueError(f"expected true or false, got {value!r}")
        return value
    if field.kind == TEXT:
        if not isinstance(value, str):
            raise ValueError(f"expected a string, got {value!r}")
        return value
    if field.kind == CHOICE:
        if value not in field.choices:
            raise ValueError(f"expected one of {', '.join(field.choices)}, got {value!r}")
        return value
    if field.kind == SHELLS:
        if value == REFERENCE:
            return value
        rows = _rows(value)
        if not rows:
            raise ValueError("a constellation needs at least one shell")
        return tuple(_shell_row(row) for row in rows)
    if field.kind == PAIRS:
        rows = _rows(value)
        if any(len(row) != 2 for row in rows):
            raise ValueError(f"expected [lat, lon] pairs, got {value!r}")
        return tuple((float(_number(lat)), float(_number(lon))) for lat, lon in rows)
    if field.kind == INTS:
        if not isinstance(value, list):
            raise ValueError(f"expected a list of integers, got {value!r}")
        return tuple(_integer(item) for item in value)
    raise ValueError(f"unknown field kind {field.kind}")


def read_settings(
    tree: Optional[Section] = None,
    overrides: Optional[Dict[str, Any]] = None,
    base: Optional[Dict[str, Any]] = None,
) -> Dict[str, Any]:
    """Flat {dotted path: value} of every key, defaults filled in.

    Args:
        tree: parsed scenario file.
        overrides: dotted paths to raw values, applied after the file.
        base: values to start from instead of the defaults.

    Raises:
        ScenarioError: listing every unknown key and every ill-typed value.
    """
    values = dict(DEFAULTS if base is None else base)
    problems: List[str] = []

    def assign(path: str, raw, line: int):
        field = FIELD_INDEX.get(path)
        if field is None:
            problems.append(f"{_where(line)}: unknown key '{path}'")
            return
        try:
            values[path] = coerce(field, raw)
        except ValueError as error:
            problems.append(f"{_where(line)}: {path}: {error}")

    def visit(section: Section, prefix: str):
        for key, setting in section.items():
            path = f"{prefix}.{key}" if prefix else key
            if isinstance(setting.value, dict):
                if path in SECTIONS:
                    visit(setting.value, path)
                else:
                    problems.append(f"{_where(setting.line)}: unknown section '{path}'")
            else:
                assign(path, setting.value, setting.line)

    visit(tree or {}, "")
    for path, raw in (overrides or {}).items():
        assign(path, raw, COMMAND_LINE)
    if problems:
        raise ScenarioError("\n".join(problems))
    return values


def _slots(seconds: float, slot_duration: float) -> int:
    if not slot_duration > 0 or not math.isfinite(seconds):
        return 0
    return int(round(seconds / slot_duration))


def _shells(value, system_tag: str) -> Tuple[ShellParams, ...]:
    if value == REFERENCE:
        return tuple(reference_shells(system_tag))
    return tuple(ShellParams(*row) for row in value)


def _pattern(values: Dict[str, Any], section: str, default: AntennaPattern) -> AntennaPattern:
    return default._replace(
        peak_gain=values[f"{section}.peak_gain_dbi"],
        beamwidth_3db=values[f"{section}.beamwidth_3db_deg"],
        sidelobe_floor=values[f"{section}.sidelobe_floor_db"],
        far_floor=values[f"{section}.far_floor_dbi"],
    )


def build_scenario(values: Dict[str, Any]) -> Scenario:
    """Assembles and validates a Scenario from flat settings.

    Raises:
        ScenarioError: listing every violated constraint.
    """
    problems: List[str] = []
    slot = values["slot_duration_s"]
    if not slot > 0:
        problems.append(f"slot_duration_s must be positive, got {slot}")
    duration = _slots(values["duration_s"], slot)
    handover = _slots(values["protection.th_s"], slot)
    window = _slots(values["protection.tw_s"], slot)
    primary_period = _slots(values["primary.handover_s"], slot)

    if handover < 1:
        problems.append(
            f"protection.th_s must cover at least one slot, got {values['protection.th_s']}"
        )
    elif duration < handover:
        problems.append(
            f"duration_s ({values['duration_s']}) must be at least protection.th_s "
            f"({values['protection.th_s']})"
        )
    if values["protection.tw_s"] < 0:
        problems.append(f"protection.tw_s cannot be negative, got {values['protection.tw_s']}")
    if primary_period < 1 and not values["primary.association_trace"]:
        problems.append(
            f"primary.handover_s must cover at least one slot, got {values['primary.handover_s']}"
        )

    beams = values["beams"]
    if not 1 <= beams <= CELLS_PER_CLUSTER:
        problems.append(f"beams must lie in [1, {CELLS_PER_CLUSTER}], got {beams}")
    elif beams not in STANDARD_BEAM_COUNTS and not values["allow_nonstandard_beams"]:
        problems.append(
            f"beams must be one of {STANDARD_BEAM_COUNTS} unless allow_nonstandard_beams is set, got {beams}"
        )
    if values["users_per_cell"] < 0:
        problems.append(f"users_per_cell cannot be negative, got {values['users_per_cell']}")
    if values["chunk_slots"] < 1:
        problems.append(f"chunk_slots must be at least 1, got {values['chunk_slots']}")

    trace = values["primary.association_trace"]
    if trace and not os.path.isfile(trace):
        problems.append(f"primary.association_trace {trace!r} does not exist")

    systems = {}
    for tag in (PRIMARY, SECONDARY):
        shells = _shells(values[f"{tag}.shells"], tag)
        for index, shell in enumerate(shells):
            problems.extend(f"{tag}.shells[{index}]: {problem}" for problem in shell.problems())
        systems[tag] = shells

    centers = values["region.centers"]
    clusters = len(centers) if centers else values["region.clusters"]
    if not centers and clusters < 1:
        problems.append(f"region.clusters must be at least 1, got {clusters}")
    for lat, lon in centers:
        if not -90 <= lat <= 90:
            problems.append(f"region.centers: latitude {lat} outside [-90, 90]")
    if not values["region.cell_radius_km"] > 0:
        problems.append(f"region.cell_radius_km must be positive, got {values['region.cell_radius_km']}")
    priorities = values["region.priorities"]
    if priorities and sorted(priorities) != list(range(1, clusters + 1)):
        problems.append(f"region.priorities must be a permutation of 1..{clusters}, got {list(priorities)}")

    link = LinkParams(
        carrier=values["link.carrier_ghz"],
        primary_max_eirp=values["primary.max_eirp_dbw_hz"],
        secondary_max_eirp=values["secondary.max_eirp_dbw_hz"],
        noise_psd=values["link.noise_psd_dbm_hz"],
        noise_figure=values["link.noise_figure_db"],
        primary_eps_min=values["primary.eps_min_deg"],
        secondary_eps_min=values["secondary.eps_min_deg"],
    )
    tx = _pattern(values, "antenna.tx", SATELLITE_TX_PATTERN)
    rx = _pattern(values, "antenna.rx", USER_RX_PATTERN)
    protection = ProtectionConfig(
        values["protection.inr_avg_th_db"],
        values["protection.inr_max_th_db"],
        max(window, 0),
        max(handover, 1),
    )
    solver = SolverConfig(
        values["solver.max_iterations"],
        values["solver.step_a"],
        values["solver.step_b"],
        values["solver.tolerance"],
        values["solver.lambda_scale"],
        values["solver.mu_scale"],
        values["solver.nu_scale"],
        values["solver.multiplier_rule"],
    )
    problems.extend(f"link: {problem}" for problem in link.problems())
    problems.extend(f"antenna.tx: {problem}" for problem in tx.problems())
    problems.extend(f"antenna.rx: {problem}" for problem in rx.problems())
    problems.extend(f"protection: {problem}" for problem in protection.problems())
    problems.extend(f"solver: {problem}" for problem in solver.problems())

    if problems:
        raise ScenarioError("\n".join(problems))

    if beams not in STANDARD_BEAM_COUNTS:
        logger.warning(f"Running with a non-standard beam count of {beams}")
    return Scenario(
        values["name"],
        values["seed"],
        values["mode"],
        slot,
        duration,
        beams,
        values["users_per_cell"],
        values["randomize_epoch"],
        values["earth_rotation"],
        values["link_trace"],
        values["chunk_slots"],
        SystemSpec(PRIMARY, systems[PRIMARY], values["primary.policy"], max(primary_period, 1), trace),
        SystemSpec(SECONDARY, systems[SECONDARY], values["secondary.policy"], max(handover, 1)),
        RegionConfig(
            values["region.clusters"],
            values["region.anchor_lat_deg"],
            values["region.anchor_lon_deg"],
            values["region.cell_radius_km"],
            centers,
            priorities,
        ),
        link,
        tx,
        rx,
        protection,
        solver,
        dict(values),
    )


_WORD = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


def format_value(field: Field, value) -> str:
    """Renders a value the way the scenario grammar reads it back."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float) and math.isinf(value):
        return "inf" if value > 0 else "-inf"
    if isinstance(value, (int, float)):
        return repr(value)
    if isinstance(value, str):
        if field.kind != TEXT and _WORD.match(value):
            return value
        return '"' + value.replace("\\", "\\\\").replace('"', '\\"') + '"'
    return "[" + ", ".join(format_value(field, item) for item in value) + "]"


def _render(section: str, values: Dict[str, Any], depth: int, lines: List[str]) -> None:
    indent = "    " * depth
    for field in FIELDS:
        if field.section == section:
            lines.append(f"{indent}# {field.help}")
            lines.append(f"{indent}{field.key} = {format_value(field, values[field.path])}")
    for child in SECTIONS:
        if _parent(child) == section:
            lines.append("")
            lines.append(f"{indent}{child.rsplit('.', 1)[-1]} {{")
            _render(child, values, depth + 1, lines)
            lines.append(f"{indent}}}")


def default_scenario_text(values: Optional[Dict[str, Any]] = None) -> str:
    """The reference scenario: every key with its comment and value."""
    lines = ["# Every scenario key with its default value.", ""]
    _render("", DEFAULTS if values is None else values, 0, lines)
    return "\n".join(lines) + "\n"
