import math
import tempfile
from pathlib import Path

from django.test import SimpleTestCase, override_settings

from association.grid import build_grid
from orbits.constants import PRIMARY_TOTAL, SECONDARY_TOTAL
from orbits.walker import build_walker_delta
from project.testing import TINY_SCENARIO, tiny_scenario
from scenarios.grammar import ScenarioParseError, parse_scenario_text
from scenarios.loader import load_scenario, parse_scenario, preset_names, resolve_scenario_path
from scenarios.schema import (
    DEFAULTS,
    FIELD_INDEX,
    PROTECTED,
    ScenarioError,
    build_scenario,
    coerce,
    default_scenario_text,
    read_settings,
)


class ReadSettingsTestCase(SimpleTestCase):
    def test_defaults_fill_everything(self):
        self.assertEqual(read_settings(), DEFAULTS)

    def test_default_scenario_text_reads_back(self):
        values = read_settings(parse_scenario_text(default_scenario_text()))
        self.assertEqual(values, DEFAULTS)

    def test_rendered_values_read_back(self):
        values = dict(DEFAULTS)
        values.update(
            {
                "name": 'quoted "name"',
                "protection.inr_max_th_db": math.inf,
                "region.centers": ((29.76, -95.37), (32.78, -96.8)),
                "region.priorities": (2, 1),
                "primary.shells": ((550.0, 53.0, 72, 22, 1),),
            }
        )
        self.assertEqual(read_settings(parse_scenario_text(default_scenario_text(values))), values)

    def test_unknown_key_names_its_line(self):
        with self.assertRaises(ScenarioError) as raised:
            read_settings(parse_scenario_text("seed = 1\nprotection {\n  th = 15\n}\nfoo { a = 1 }"))
        message = str(raised.exception)
        self.assertIn("Line 3: unknown key 'protection.th'", message)
        self.assertIn("Line 5: unknown section 'foo'", message)

    def test_type_errors_are_collected(self):
        with self.assertRaises(ScenarioError) as raised:
            read_settings(parse_scenario_text('seed = 1.5\nbeams = "16"\nmode = fast'))
        lines = str(raised.exception).splitlines()
        self.assertEqual(len(lines), 3)
        self.assertTrue(lines[0].startswith("Line 1: seed"))

    def test_command_line_overrides(self):
        values = read_settings(parse_scenario_text("seed = 1"), {"seed": 9, "protection.tw_s": 5})
        self.assertEqual(values["seed"], 9)
        self.assertEqual(values["protection.tw_s"], 5.0)
        with self.assertRaises(ScenarioError) as raised:
            read_settings(overrides={"protection.bogus": 1})
        self.assertIn("Command line: unknown key 'protection.bogus'", str(raised.exception))

    def test_coerce(self):
        self.assertEqual(coerce(FIELD_INDEX["seed"], 3.0), 3)
        self.assertEqual(coerce(FIELD_INDEX["duration_s"], 3), 3.0)
        self.assertEqual(coerce(FIELD_INDEX["primary.shells"], "reference"), "reference")
        self.assertEqual(
            coerce(FIELD_INDEX["secondary.shells"], [[630, 51.9, 34, 34]]), ((630.0, 51.9, 34, 34),)
        )
        for path, value in [
            ("seed", True),
            ("link_trace", 1),
            ("primary.shells", []),
            ("primary.shells", [[550.0, 53.0, 72]]),
            ("region.centers", [[1.0, 2.0, 3.0]]),
            ("region.priorities", [1.5]),
        ]:
            with self.subTest(path=path, value=value):
                with self.assertRaises(ValueError):
                    coerce(FIELD_INDEX[path], value)


class BuildScenarioTestCase(SimpleTestCase):
    def test_tiny_scenario(self):
        scenario = tiny_scenario()
        self.assertEqual(scenario.name, "tiny")
        self.assertEqual(scenario.mode, PROTECTED)
        self.assertEqual(scenario.duration_slots, 20)
        self.assertEqual(scenario.handover_period, 10)
        self.assertEqual(scenario.protection.window_past, 10)
        self.assertEqual(scenario.primary.handover_period, 10)
        self.assertEqual(scenario.seed, 0)
        self.assertFalse(scenario.earth_rotation)
        self.assertEqual(len(scenario.secondary.shells), 1)

    def test_echo_is_nested(self):
        echo = tiny_scenario(protection__inr_max_th_db=math.inf).as_dict()
        self.assertEqual(echo["seed"], 0)
        self.assertEqual(echo["protection"]["inr_max_th_db"], math.inf)
        self.assertEqual(echo["antenna"]["tx"]["beamwidth_3db_deg"], 1.6)
        self.assertEqual(echo["region"]["centers"], [[0.0, 0.0]])

    def test_override(self):
        scenario = tiny_scenario().override({"mode": "baseline", "seed": 4})
        self.assertEqual(scenario.mode, "baseline")
        self.assertEqual(scenario.seed, 4)
        self.assertEqual(scenario.name, "tiny")

    def test_handover_period_must_cover_a_slot(self):
        with self.assertRaisesMessage(ScenarioError, "protection.th_s must cover at least one slot"):
            tiny_scenario(protection__th_s=0.0)

    def test_duration_must_cover_a_handover(self):
        with self.assertRaisesMessage(ScenarioError, "must be at least protection.th_s"):
            tiny_scenario(duration_s=0.5)

    def test_beam_counts(self):
        with self.assertRaisesMessage(ScenarioError, "unless allow_nonstandard_beams is set"):
            tiny_scenario(beams=12)
        with self.assertLogs("scenarios.schema", "WARNING"):
            self.assertEqual(tiny_scenario(beams=12, allow_nonstandard_beams=True).n_beams, 12)
        with self.assertRaisesMessage(ScenarioError, "beams must lie in [1, 127]"):
            tiny_scenario(beams=128, allow_nonstandard_beams=True)

    def test_every_problem_is_reported(self):
        with self.assertRaises(ScenarioError) as raised:
            tiny_scenario(
                slot_duration_s=0.1,
                protection__tw_s=-1.0,
                protection__inr_max_th_db=-10.0,
                region__priorities=[2],
                solver__step_a=0.0,
            )
        message = str(raised.exception)
        for fragment in ("tw_s cannot be negative", "inr_max_threshold_db", "priorities", "step_a"):
            self.assertIn(fragment, message)

    def test_missing_association_trace(self):
        with self.assertRaisesMessage(ScenarioError, "does not exist"):
            tiny_scenario(primary__association_trace="/nonexistent/trace.csv")

    def test_bad_shell(self):
        with self.assertRaisesMessage(ScenarioError, "primary.shells[0]"):
            tiny_scenario(primary__shells=[[550.0, 53.0, 0, 22]])

    def test_parse_errors_pass_through(self):
        with self.assertRaises(ScenarioParseError):
            parse_scenario(TINY_SCENARIO + "\nregion {")


class LoaderTestCase(SimpleTestCase):
    def test_presets(self):
        self.assertIn("starlink_kuiper_texas", preset_names())
        self.assertIn("small_region", preset_names())

    def test_default_preset(self):
        scenario = load_scenario()
        self.assertEqual(scenario.name, "starlink_kuiper_texas")
        self.assertEqual(len(build_walker_delta(scenario.primary.shells, "primary")), PRIMARY_TOTAL)
        self.assertEqual(len(build_walker_delta(scenario.secondary.shells, "secondary")), SECONDARY_TOTAL)
        grid = build_grid(scenario.region)
        self.assertEqual(len(grid), 10)
        self.assertEqual(grid.cells_per_cluster, 127)
        self.assertEqual(scenario.handover_period, 150)
        self.assertEqual(scenario.protection.window_past, 100)

    def test_overrides_apply_to_presets(self):
        scenario = load_scenario("small_region", {"protection.inr_avg_th_db": -12.2})
        self.assertEqual(scenario.protection.inr_avg_threshold_db, -12.2)
        self.assertEqual(scenario.region.clusters, 3)

    def test_file_path(self):
        with tempfile.TemporaryDirectory() as folder:
            path = Path(folder, "mine.scenario")
            path.write_text(TINY_SCENARIO)
            self.assertEqual(resolve_scenario_path(str(path)), path)
            self.assertEqual(load_scenario(str(path)).name, "tiny")

    def test_unknown_scenario(self):
        with self.assertRaisesMessage(ScenarioError, "No scenario file or preset named 'nowhere'"):
            resolve_scenario_path("nowhere")

    @override_settings(SCENARIO_PRESET_DIR="/nonexistent")
    def test_missing_preset_folder(self):
        self.assertEqual(preset_names(), [])
        with self.assertRaises(ScenarioError):
            load_scenario("small_region")
