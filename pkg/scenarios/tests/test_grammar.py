import math

from django.test import SimpleTestCase

from scenarios.grammar import ScenarioParseError, parse_scenario_text


def values(section):
    return {
        key: values(setting.value) if isinstance(setting.value, dict) else setting.value
        for key, setting in section.items()
    }


class ScenarioGrammarTestCase(SimpleTestCase):
    def test_scalar_values(self):
        parsed = values(
            parse_scenario_text(
                'name = "Texas run"\nseed = 7\nduration_s = 60.5\nlink_trace = true\n'
                "earth_rotation = false\nmode = baseline\nrate = 1e-3\n"
            )
        )
        self.assertEqual(
            parsed,
            {
                "name": "Texas run",
                "seed": 7,
                "duration_s": 60.5,
                "link_trace": True,
                "earth_rotation": False,
                "mode": "baseline",
                "rate": 0.001,
            },
        )
        self.assertIsInstance(parsed["seed"], int)

    def test_infinities(self):
        parsed = values(parse_scenario_text("a = inf\nb = -inf\nc = +inf\ninfo = 1"))
        self.assertEqual(parsed["a"], math.inf)
        self.assertEqual(parsed["b"], -math.inf)
        self.assertEqual(parsed["c"], math.inf)
        self.assertEqual(parsed["info"], 1)

    def test_nested_blocks_and_comments(self):
        text = """
        # comment on its own line
        antenna {
            tx { peak_gain_dbi = 38.5 }  # trailing comment
            rx {
                beamwidth_3db_deg = 1.6
            }
        }
        """
        parsed = values(parse_scenario_text(text))
        self.assertEqual(
            parsed, {"antenna": {"tx": {"peak_gain_dbi": 38.5}, "rx": {"beamwidth_3db_deg": 1.6}}}
        )

    def test_lists(self):
        parsed = values(
            parse_scenario_text("empty = []\nflat = [1, 2, 3,]\nrows = [[29.7, -95.3], [32.7, -96.8]]")
        )
        self.assertEqual(parsed["empty"], [])
        self.assertEqual(parsed["flat"], [1, 2, 3])
        self.assertEqual(parsed["rows"], [[29.7, -95.3], [32.7, -96.8]])

    def test_line_numbers(self):
        section = parse_scenario_text("\n\nseed = 1\nregion {\n  clusters = 3\n}")
        self.assertEqual(section["seed"].line, 3)
        self.assertEqual(section["region"].line, 4)
        self.assertEqual(section["region"].value["clusters"].line, 5)

    def test_duplicate_key(self):
        with self.assertRaises(ScenarioParseError) as raised:
            parse_scenario_text("region {\n  clusters = 3\n  clusters = 4\n}")
        self.assertEqual(raised.exception.line, 3)
        self.assertIn("'region.clusters' is already set on line 2", str(raised.exception))

    def test_syntax_error_position(self):
        with self.assertRaises(ScenarioParseError) as raised:
            parse_scenario_text("seed = 1\nbeams 16\n")
        self.assertEqual(raised.exception.line, 2)
        self.assertTrue(str(raised.exception).startswith("Line 2"))
        self.assertIn("beams 16", raised.exception.context)

    def test_unclosed_block(self):
        with self.assertRaises(ScenarioParseError):
            parse_scenario_text("region {\n  clusters = 3\n")
