import math
import tempfile
from pathlib import Path

import pandas
from django.test import SimpleTestCase

from project.testing import write_tiny_scenario
from scenarios.export import ExportError
from scenarios.sweeps import (
    SWEEP_SUMMARY_FILE,
    SWEEPS,
    beam_points,
    handover_points,
    run_sweep,
    summary_row,
    sweep_points,
    threshold_points,
    window_points,
)


class SweepPointsTestCase(SimpleTestCase):
    def test_sizes(self):
        self.assertEqual(len(threshold_points()), 12)
        self.assertEqual(len(handover_points()), 18)
        self.assertEqual(len(window_points()), 24)
        self.assertEqual(len(beam_points()), 12)

    def test_labels_are_unique(self):
        for name in SWEEPS:
            with self.subTest(sweep=name):
                labels = [point.label for point in sweep_points(name)]
                self.assertEqual(len(labels), len(set(labels)))

    def test_threshold_points(self):
        points = {point.label: point.overrides for point in threshold_points()}
        self.assertEqual(points["avg-6_max-6"]["protection.inr_max_th_db"], -6.0)
        self.assertEqual(points["avg-6_maxinf"]["protection.inr_max_th_db"], math.inf)
        self.assertEqual(points["avg-12.2_maxinf"]["protection.inr_avg_th_db"], -12.2)

    def test_threshold_grid(self):
        pairs = {
            (point.overrides["protection.inr_avg_th_db"], point.overrides["protection.inr_max_th_db"])
            for point in threshold_points()
        }
        expected = {(avg, peak) for avg in (-6.0, -12.2) for peak in (-6.0, -3.0, 0.0, 3.0, math.inf)}
        expected.update({(-10.0, math.inf), (0.0, math.inf)})
        self.assertEqual(pairs, expected)
        self.assertEqual(len(pairs), len(threshold_points()))
        for point in threshold_points():
            self.assertEqual(point.overrides["mode"], "protected")

    def test_beam_points(self):
        labels = [point.label for point in beam_points()][:3]
        self.assertEqual(labels, ["baseline_he_beams8", "baseline_mct_beams8", "protected_he_beams8"])

    def test_unknown_sweep(self):
        with self.assertRaisesMessage(ValueError, "Unknown sweep 'nope'"):
            sweep_points("nope")

    def test_summary_row(self):
        row = summary_row(
            "point", {"protection.inr_max_th_db": math.inf, "beams": 8}, {"mean_utilization": 0.5}
        )
        self.assertEqual(row["point"], "point")
        self.assertEqual(row["protection.inr_max_th_db"], "inf")
        self.assertEqual(row["beams"], 8)
        self.assertEqual(row["mean_utilization"], 0.5)
        self.assertIsNone(row["mean_violation_rate"])


class RunSweepTestCase(SimpleTestCase):
    def test_threshold_sweep(self):
        with tempfile.TemporaryDirectory() as folder:
            scenario = write_tiny_scenario(folder)
            out = Path(folder, "sweep")
            frame = run_sweep("thresholds", scenario, out)
            self.assertEqual(len(frame), 12)
            written = pandas.read_csv(out / SWEEP_SUMMARY_FILE)
            self.assertEqual(list(written["point"]), [point.label for point in threshold_points()])
            for label in written["point"]:
                self.assertTrue((out / label / "summary.json").is_file())
            strict = frame.set_index("point").loc["avg-6_max-6"]
            self.assertEqual(strict["mean_violation_rate"], 0.0)

            with self.assertRaises(ExportError):
                run_sweep("thresholds", scenario, out)

    def test_base_overrides_reach_every_point(self):
        with tempfile.TemporaryDirectory() as folder:
            scenario = write_tiny_scenario(folder)
            out = Path(folder, "sweep")
            frame = run_sweep("beams", scenario, out, {"duration_s": 1.0, "protection.th_s": 0.5})
            self.assertEqual(len(frame), 12)
            summary = (out / "protected_he_beams8" / "summary.json").read_text()
            self.assertIn('"duration_s": 1.0', summary)
