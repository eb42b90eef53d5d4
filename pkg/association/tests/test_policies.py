import math

import numpy as np
import pandas
from django.test import SimpleTestCase

from association.matrix import AssociationMatrix
from association.policies import (
    HIGHEST_ELEVATION,
    MAX_CONTACT_TIME,
    assign_highest_elevation,
    assign_max_contact_time,
    baseline_secondary_assign,
    contact_slots,
    priority_greedy,
)
from association.sources import (
    TRACE_COLUMNS,
    UNSERVED,
    PolicyAssociationSource,
    SourceCoverageError,
    TraceAssociationSource,
    association_frame,
)
from orbits.constants import PRIMARY, SECONDARY
from project.testing import SLOT_DURATION, equatorial_shell, tiny_grid, tiny_system

# 240 satellites 1.5 degrees apart, the first at longitude 0.5
RING = equatorial_shell(550.0, sats=240, anomaly_offset=0.5)


def longitude(position) -> float:
    return math.degrees(math.atan2(position[1], position[0]))


class PriorityGreedyTestCase(SimpleTestCase):
    def test_contested_satellite_goes_to_the_higher_priority(self):
        preferences = [[3, 1], [3, 2], []]
        self.assertEqual(priority_greedy(preferences, [0, 1, 2]), [3, 2, None])
        self.assertEqual(priority_greedy(preferences, [1, 0, 2]), [1, 3, None])

    def test_taken_satellites(self):
        self.assertEqual(priority_greedy([[3, 1]], [0], taken={3, 1}), [None])


class HighestElevationTestCase(SimpleTestCase):
    def test_each_cluster_gets_the_satellite_above_it(self):
        grid = tiny_grid(((0.0, 0.0), (0.0, 6.5)))
        system = tiny_system(PRIMARY, [RING], grid)
        matrix = assign_highest_elevation(system.snapshots, grid, None, 0)
        self.assertEqual(matrix.satellites, (0, 4))
        self.assertEqual(matrix.system_tag, PRIMARY)

    def test_priority_breaks_conflicts(self):
        centres = ((0.0, 0.0), (0.0, 0.3))
        grid = tiny_grid(centres)
        system = tiny_system(PRIMARY, [RING], grid)
        self.assertEqual(assign_highest_elevation(system.snapshots, grid, None, 0).satellites, (0, 239))

        grid = tiny_grid(centres, priorities=(2, 1))
        system = tiny_system(PRIMARY, [RING], grid)
        self.assertEqual(assign_highest_elevation(system.snapshots, grid, None, 0).satellites, (239, 0))

    def test_nothing_overhead(self):
        grid = tiny_grid()
        system = tiny_system(PRIMARY, [equatorial_shell(550.0, anomaly_offset=180.0)], grid)
        self.assertEqual(assign_highest_elevation(system.snapshots, grid, None, 0).satellites, (None,))


class MaxContactTimeTestCase(SimpleTestCase):
    def setUp(self):
        self.grid = tiny_grid()
        self.snapshots = tiny_system(SECONDARY, [RING], self.grid).snapshots

    def test_picks_the_satellite_that_rose_last(self):
        matrix = assign_max_contact_time(self.snapshots, self.grid, None, 0)
        candidates = self.snapshots.overhead(0).per_cluster[0]
        positions = self.snapshots.positions(0)
        westmost = min(candidates.tolist(), key=lambda m: longitude(positions[m]))
        self.assertEqual(matrix.satellites, (westmost,))

    def test_keeps_a_visible_satellite(self):
        first = assign_max_contact_time(self.snapshots, self.grid, None, 0)
        self.assertEqual(assign_max_contact_time(self.snapshots, self.grid, first, 1), first)

    def test_replaces_a_setting_satellite(self):
        stale = AssociationMatrix((120,), SECONDARY)
        matrix = assign_max_contact_time(self.snapshots, self.grid, stale, 0)
        self.assertNotEqual(matrix.satellites, (120,))
        self.assertIsNotNone(matrix.satellites[0])

    def test_contact_slots(self):
        candidates = self.snapshots.overhead(0).per_cluster[0]
        horizon = self.snapshots.lookahead_slots()
        contact = contact_slots(self.snapshots, candidates, 0, 0, horizon)
        self.assertTrue(np.all(contact > 0))
        self.assertTrue(np.all(contact < horizon))
        # eastward motion: each satellite sets 1.5 degrees of orbit before its western neighbour
        order = np.argsort([longitude(self.snapshots.positions(0)[m]) for m in candidates])
        self.assertTrue(np.all(np.diff(contact[order]) < 0))

        first = candidates[order[-1]]
        up = self.snapshots.visible(first, 0, np.arange(contact[order[-1]] + 1))
        self.assertTrue(up[:-1].all())
        self.assertFalse(up[-1])

    def test_baseline_uses_the_same_policies(self):
        self.assertEqual(
            baseline_secondary_assign(MAX_CONTACT_TIME, self.snapshots, self.grid, None, 0),
            assign_max_contact_time(self.snapshots, self.grid, None, 0),
        )


class AssociationSourceTestCase(SimpleTestCase):
    def setUp(self):
        self.grid = tiny_grid(((0.0, 0.0), (0.0, 6.5)))
        self.snapshots = tiny_system(PRIMARY, [RING], self.grid).snapshots

    def test_highest_elevation_holds_for_a_period(self):
        source = PolicyAssociationSource(self.snapshots, self.grid, HIGHEST_ELEVATION, 150)
        self.assertIs(source.association_at(149), source.association_at(0))
        table = source.serving_table(np.arange(3))
        np.testing.assert_array_equal(table, [[0, 4]] * 3)

    def test_policy_errors(self):
        with self.assertRaises(ValueError):
            PolicyAssociationSource(self.snapshots, self.grid, "closest", 150)
        source = PolicyAssociationSource(self.snapshots, self.grid, MAX_CONTACT_TIME, 150)
        with self.assertRaises(SourceCoverageError):
            source.association_at(-1)

    def test_trace_replay(self):
        source = PolicyAssociationSource(self.snapshots, self.grid, MAX_CONTACT_TIME, 150)
        slots = np.arange(3)
        recorded = source.associations(slots)
        frame = association_frame(recorded, slots, SLOT_DURATION)
        self.assertEqual(list(frame.columns), TRACE_COLUMNS)
        replay = TraceAssociationSource(frame, self.grid, PRIMARY, SLOT_DURATION)
        self.assertEqual(replay.associations(slots), recorded)
        with self.assertRaises(SourceCoverageError):
            replay.association_at(3)

    def test_trace_unserved_and_other_systems(self):
        frame = pandas.DataFrame(
            [(0.0, PRIMARY, 0, UNSERVED), (0.0, PRIMARY, 1, 7), (0.0, SECONDARY, 0, 3)],
            columns=TRACE_COLUMNS,
        )
        replay = TraceAssociationSource(frame, self.grid, PRIMARY, SLOT_DURATION)
        self.assertEqual(replay.association_at(0).satellites, (None, 7))
        np.testing.assert_array_equal(replay.serving_table([0]), [[UNSERVED, 7]])

    def test_bad_traces(self):
        with self.assertRaises(SourceCoverageError):
            TraceAssociationSource(pandas.DataFrame({"time_s": [0.0]}), self.grid, PRIMARY, 0.1)
        frame = pandas.DataFrame([(0.0, PRIMARY, 5, 1)], columns=TRACE_COLUMNS)
        with self.assertRaises(SourceCoverageError):
            TraceAssociationSource(frame, self.grid, PRIMARY, 0.1)
