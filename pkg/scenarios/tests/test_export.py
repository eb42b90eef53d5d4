import json
import math
import tempfile
from pathlib import Path

import numpy as np
import pandas
from django.test import SimpleTestCase

from project.testing import tiny_scenario
from scenarios.export import HANDOVER_FILE, SUMMARY_FILE, ExportError, export_results, jsonable
from scenarios.simulation import LINK_TRACE_COLUMNS, run_simulation

CSV_FILES = [
    "violation_rate.csv",
    "utilization.csv",
    "per_user_violation.csv",
    "inr_cdf.csv",
    "sinr_cdf.csv",
    "violation_report.csv",
    "window_gaps.csv",
    "association_trace.csv",
    "lifetimes.csv",
    "lifetime_histogram.csv",
    "link_trace.csv",
]


class JsonableTestCase(SimpleTestCase):
    def test_plain_types(self):
        value = jsonable(
            {
                "inf": math.inf,
                "neg": -math.inf,
                "nan": math.nan,
                "int": np.int64(3),
                "flag": np.bool_(True),
                "array": np.array([0.5, np.inf]),
                "nested": {1: (np.float32(0.25),)},
            }
        )
        self.assertEqual(
            value,
            {
                "inf": "inf",
                "neg": "-inf",
                "nan": None,
                "int": 3,
                "flag": True,
                "array": [0.5, "inf"],
                "nested": {"1": [0.25]},
            },
        )
        self.assertIs(type(value["int"]), int)
        json.dumps(value)


class ExportResultsTestCase(SimpleTestCase):
    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.result = run_simulation(tiny_scenario(protection__inr_max_th_db=math.inf))

    def setUp(self):
        self.folder = tempfile.TemporaryDirectory()
        self.out = Path(self.folder.name, "run")

    def tearDown(self):
        self.folder.cleanup()

    def test_writes_every_file(self):
        written = export_results(self.result, self.out)
        self.assertEqual(
            sorted(path.name for path in written), sorted(CSV_FILES + [HANDOVER_FILE, SUMMARY_FILE])
        )
        violation = pandas.read_csv(self.out / "violation_rate.csv")
        self.assertEqual(list(violation.columns), ["time_s", "violation_rate"])
        self.assertEqual(len(violation), 20)
        self.assertEqual(len(pandas.read_csv(self.out / "utilization.csv")), 2)

    def test_summary_and_diagnostics(self):
        export_results(self.result, self.out)
        summary = json.loads((self.out / SUMMARY_FILE).read_text())
        self.assertEqual(summary["name"], "tiny")
        self.assertEqual(summary["scenario"]["protection"]["inr_max_th_db"], "inf")
        handovers = json.loads((self.out / HANDOVER_FILE).read_text())
        self.assertEqual([h["time_s"] for h in handovers], [0.0, 1.0])

    def test_link_trace_off_writes_headers(self):
        export_results(self.result, self.out)
        trace = pandas.read_csv(self.out / "link_trace.csv")
        self.assertEqual(list(trace.columns), LINK_TRACE_COLUMNS)
        self.assertEqual(len(trace), 0)

    def test_existing_directory(self):
        export_results(self.result, self.out)
        with self.assertRaises(ExportError) as raised:
            export_results(self.result, self.out)
        self.assertEqual(raised.exception.path, self.out)
        export_results(self.result, self.out, overwrite=True)

    def test_file_in_the_way(self):
        self.out.write_text("")
        with self.assertRaisesMessage(ExportError, "not a directory"):
            export_results(self.result, self.out, overwrite=True)

    def test_reruns_are_byte_identical(self):
        export_results(self.result, self.out)
        again = Path(self.folder.name, "again")
        export_results(run_simulation(tiny_scenario(protection__inr_max_th_db=math.inf)), again)
        for path in sorted(self.out.iterdir()):
            with self.subTest(name=path.name):
                self.assertEqual(path.read_bytes(), (again / path.name).read_bytes())
