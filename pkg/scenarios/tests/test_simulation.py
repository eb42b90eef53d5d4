import tempfile
from pathlib import Path

import numpy as np
import pandas
from django.test import SimpleTestCase

from association.sources import UNSERVED, SourceCoverageError
from orbits.constants import PRIMARY, SECONDARY
from project.testing import tiny_scenario
from scenarios.loader import parse_scenario
from scenarios.simulation import CoexistenceSimulation, run_simulation

STRICT = {"protection__inr_avg_th_db": -6.0, "protection__inr_max_th_db": -6.0}
# Far above any INR the tiny scene produces.
LOOSE = {"protection__inr_avg_th_db": 100.0}


class CoexistenceSimulationTestCase(SimpleTestCase):
    def test_layout(self):
        simulation = CoexistenceSimulation(tiny_scenario(users_per_cell=2))
        self.assertEqual(
            simulation.layout,
            {
                "primary_satellites": 1,
                "secondary_satellites": 2,
                "clusters": 1,
                "cells_per_cluster": 127,
                "primary_users": 127 * 3,
                "secondary_users": 127 * 3,
            },
        )
        self.assertEqual(len(simulation.protected), 127)
        self.assertTrue(simulation.protected.representative.all())

    def test_strict_thresholds_hold_back_the_co_located_satellite(self):
        result = run_simulation(tiny_scenario(**STRICT))
        summary = result.summary()
        self.assertEqual(summary["handovers"], 2)
        self.assertEqual(summary["slots"], 20)
        self.assertEqual(summary["mean_violation_rate"], 0.0)
        self.assertEqual(summary["window_avg_violations"], 0)
        self.assertEqual(summary["window_abs_violations"], 0)
        self.assertEqual(summary["mean_utilization"], 0.0)
        self.assertEqual(summary["outage_handovers"], 2)
        for handover in result.handovers:
            self.assertTrue(handover["feasible"])
        secondary = result.associations[result.associations["system"] == SECONDARY]
        self.assertTrue((secondary["sat_id"] == UNSERVED).all())

    def test_loose_thresholds_serve_every_cluster(self):
        result = run_simulation(tiny_scenario(**LOOSE))
        summary = result.summary()
        self.assertEqual(summary["mean_utilization"], 1.0)
        self.assertEqual(summary["outage_handovers"], 0)
        secondary = result.associations[result.associations["system"] == SECONDARY]
        np.testing.assert_array_equal(secondary["sat_id"].unique(), [0])

    def test_baseline_ignores_protection(self):
        baseline = run_simulation(tiny_scenario(mode="baseline", **STRICT)).summary()
        self.assertEqual(baseline["mean_utilization"], 1.0)
        self.assertGreater(baseline["mean_violation_rate"], 0.0)
        self.assertGreater(baseline["window_abs_violations"], 0)

    def test_primary_association_follows_the_policy(self):
        result = run_simulation(tiny_scenario())
        primary = result.associations[result.associations["system"] == PRIMARY]
        self.assertEqual(len(primary), 20)
        self.assertTrue((primary["sat_id"] == 0).all())
        lifetimes = result.lifetimes[result.lifetimes["system"] == PRIMARY]
        self.assertEqual(len(lifetimes), 1)
        self.assertAlmostEqual(lifetimes["duration_s"].iloc[0], 2.0)

    def test_summary_echoes_the_scenario(self):
        summary = run_simulation(tiny_scenario(seed=5)).summary()
        self.assertEqual(summary["name"], "tiny")
        self.assertEqual(summary["seed"], 5)
        self.assertEqual(summary["mode"], "protected")
        self.assertAlmostEqual(summary["duration_s"], 2.0)
        self.assertEqual(summary["scenario"]["protection"]["th_s"], 1.0)
        self.assertEqual(summary["layout"]["clusters"], 1)

    def test_link_trace(self):
        self.assertIsNone(run_simulation(tiny_scenario()).link_trace)
        trace = run_simulation(tiny_scenario(link_trace=True, **LOOSE)).link_trace
        self.assertEqual(len(trace), 2 * 20 * 127)
        self.assertEqual(sorted(trace["system"].unique()), [PRIMARY, SECONDARY])
        primary = trace[trace["system"] == PRIMARY]
        self.assertTrue((primary["sinr_db"] <= primary["snr_db"] + 1e-9).all())

    def test_random_users_are_seeded(self):
        first = CoexistenceSimulation(tiny_scenario(users_per_cell=1, seed=3))
        second = CoexistenceSimulation(tiny_scenario(users_per_cell=1, seed=3))
        other = CoexistenceSimulation(tiny_scenario(users_per_cell=1, seed=4))
        np.testing.assert_array_equal(first.primary_users.positions, second.primary_users.positions)
        self.assertFalse(np.allclose(first.primary_users.positions, other.primary_users.positions))
        self.assertFalse(np.allclose(first.primary_users.positions, first.secondary_users.positions))

    def test_replayed_primary_trace_matches_the_policy(self):
        policy = run_simulation(tiny_scenario(**LOOSE))
        with tempfile.TemporaryDirectory() as folder:
            path = Path(folder, "primary.csv")
            policy.associations.to_csv(path, index=False)
            replay = run_simulation(tiny_scenario(primary__association_trace=str(path), **LOOSE))
        pandas.testing.assert_frame_equal(replay.associations, policy.associations)
        self.assertEqual(replay.report.summary(), policy.report.summary())

    def test_trace_gap_is_an_error(self):
        with tempfile.TemporaryDirectory() as folder:
            path = Path(folder, "primary.csv")
            pandas.DataFrame(
                {"time_s": [0.0], "system": [PRIMARY], "cluster": [0], "sat_id": [0]}
            ).to_csv(path, index=False)
            with self.assertRaises(SourceCoverageError):
                run_simulation(tiny_scenario(mode="baseline", primary__association_trace=str(path)))


# Equatorial shells of 24 satellites 15 degrees apart; each pass over the
# cluster is shorter than the run, so the first secondary satellite sets
# partway through a 150-slot handover block.
PASSING_SCENARIO = """
name = "passing"
duration_s = 300.0
slot_duration_s = 1.0
beams = 8
earth_rotation = false
mode = "baseline"

primary {
    shells = [[550.0, 0.0, 1, 24]]
    policy = "mct"
}

secondary {
    shells = [[600.0, 0.0, 1, 24]]
    policy = "mct"
}

region {
    centers = [[0.0, 0.0]]
}

protection {
    th_s = 150.0
    tw_s = 150.0
}
"""


class BaselineHandoverTestCase(SimpleTestCase):
    def run_passing(self, policy):
        simulation = CoexistenceSimulation(parse_scenario(PASSING_SCENARIO, {"secondary.policy": policy}))
        return simulation, simulation.run()

    def serving_rows(self, result):
        rows = result.associations[
            (result.associations["system"] == SECONDARY) & (result.associations["sat_id"] != UNSERVED)
        ]
        slots = np.rint(rows["time_s"].to_numpy() / 1.0).astype(int)
        return zip(slots, rows["cluster"], rows["sat_id"])

    def test_mct_never_serves_below_minimum_elevation(self):
        simulation, result = self.run_passing("mct")
        snapshots = simulation.engine.secondary.snapshots
        served = set()
        for slot, cluster, satellite in self.serving_rows(result):
            served.add(satellite)
            self.assertTrue(
                snapshots.visible(int(satellite), int(cluster), [int(slot)]).all(),
                f"satellite {satellite} serves cluster {cluster} below eps_min at slot {slot}",
            )
        self.assertGreater(len(served), 1)
        self.assertGreater(sum(h["slot_handovers"] for h in result.handovers), 0)

    def test_mct_hands_over_inside_a_block(self):
        _, result = self.run_passing("mct")
        secondary = result.associations[result.associations["system"] == SECONDARY]
        changes = secondary["sat_id"].to_numpy()
        switch_slots = np.flatnonzero(changes[1:] != changes[:-1]) + 1
        self.assertTrue(any(slot % 150 for slot in switch_slots))
        self.assertEqual(result.summary()["slots"], 300)

    def test_he_holds_its_choice_for_the_block(self):
        _, result = self.run_passing("he")
        secondary = result.associations[result.associations["system"] == SECONDARY]
        for start in (0, 150):
            block = secondary[(secondary["time_s"] >= start) & (secondary["time_s"] < start + 150)]
            self.assertEqual(block["sat_id"].nunique(), 1)
        for handover in result.handovers:
            self.assertEqual(handover["slot_handovers"], 0)
