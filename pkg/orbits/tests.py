import math
import tempfile
from io import StringIO
from pathlib import Path

import numpy as np
import pandas
from django.core.management import call_command
from django.test import SimpleTestCase

from orbits.constants import EARTH_RADIUS_M, PRIMARY, PRIMARY_TOTAL, SECONDARY, SECONDARY_TOTAL
from orbits.geometry import (
    GeometryError,
    elevation_angle,
    elevation_table,
    geodetic_to_ecef,
    overhead_from_positions,
    overhead_sets,
)
from orbits.snapshots import SnapshotCache
from orbits.walker import (
    POSITION_COLUMNS,
    ConstellationError,
    ShellParams,
    build_walker_delta,
    orbital_period,
    positions_at,
    positions_frame,
    propagate_ecef,
    randomize_epoch,
    reference_shells,
)
from project.testing import tiny_grid


class WalkerDeltaTestCase(SimpleTestCase):
    def test_reference_sizes(self):
        self.assertEqual(len(build_walker_delta(reference_shells(PRIMARY), PRIMARY)), PRIMARY_TOTAL)
        self.assertEqual(
            len(build_walker_delta(reference_shells(SECONDARY), SECONDARY)), SECONDARY_TOTAL
        )

    def test_layout(self):
        constellation = build_walker_delta([ShellParams(550.0, 53.0, 4, 3)], PRIMARY)
        np.testing.assert_allclose(constellation.raan[::3], [0.0, 90.0, 180.0, 270.0])
        np.testing.assert_allclose(constellation.anomaly[:3], [0.0, 120.0, 240.0])
        # plane 1 is phased by 360 / 12 degrees
        np.testing.assert_allclose(constellation.anomaly[3:6], [30.0, 150.0, 270.0])

    def test_shells_are_numbered_in_order(self):
        constellation = build_walker_delta(
            [ShellParams(550.0, 53.0, 2, 2), ShellParams(600.0, 40.0, 1, 3)], SECONDARY
        )
        self.assertEqual(constellation.shell_counts(), [4, 3])
        self.assertEqual(constellation.top_altitude, 600e3)
        self.assertEqual(constellation.bottom_altitude, 550e3)

    def test_rejects_bad_shells(self):
        with self.assertRaises(ConstellationError):
            build_walker_delta([], PRIMARY)
        with self.assertRaises(ConstellationError):
            build_walker_delta([ShellParams(550.0, 53.0, 0, 10)], PRIMARY)
        with self.assertRaises(ConstellationError):
            build_walker_delta([ShellParams(-1.0, 53.0, 1, 10)], PRIMARY)
        with self.assertRaises(ConstellationError):
            build_walker_delta([ShellParams(550.0, 53.0, 1, 10)], "tertiary")

    def test_randomized_epoch_keeps_the_geometry(self):
        shells = randomize_epoch(reference_shells(SECONDARY), np.random.default_rng(0))
        for drawn, reference in zip(shells, reference_shells(SECONDARY)):
            self.assertEqual(drawn[:4], reference[:4])
            self.assertTrue(0.0 <= drawn.anomaly_offset < 360.0)


class PropagationTestCase(SimpleTestCase):
    def setUp(self):
        self.constellation = build_walker_delta([ShellParams(550.0, 0.0, 1, 4)], PRIMARY)

    def test_orbital_period(self):
        self.assertAlmostEqual(orbital_period(550.0), 5730.0, delta=5.0)

    def test_starts_on_the_x_axis(self):
        position = positions_at(self.constellation, 0, 1.0)[0]
        np.testing.assert_allclose(position, [EARTH_RADIUS_M + 550e3, 0.0, 0.0], atol=1e-6)

    def test_radius_is_constant(self):
        positions = positions_at(self.constellation, np.arange(0, 5000, 250), 1.0)
        np.testing.assert_allclose(
            np.linalg.norm(positions, axis=-1), EARTH_RADIUS_M + 550e3, rtol=1e-12
        )

    def test_one_period_returns_home_without_earth_rotation(self):
        period = orbital_period(550.0)
        start = positions_at(self.constellation, 0, period, earth_rotation=0.0)
        later = positions_at(self.constellation, 1, period, earth_rotation=0.0)
        np.testing.assert_allclose(start, later, atol=1e-3)

    def test_earth_rotation_shifts_longitude(self):
        period = orbital_period(550.0)
        later = positions_at(self.constellation, 1, period)[0]
        longitude = math.degrees(math.atan2(later[1], later[0]))
        expected = -math.degrees(7.2921159e-5 * period)
        self.assertAlmostEqual(longitude, expected, places=3)

    def test_subset_and_states(self):
        subset = positions_at(self.constellation, [3], 1.0, indices=[2])
        self.assertEqual(subset.shape, (1, 1, 3))
        states = propagate_ecef(self.constellation, 3, 1.0)
        self.assertEqual([state.satellite_id for state in states], [0, 1, 2, 3])
        np.testing.assert_allclose(states[2].position, subset[0, 0])

    def test_negative_slot(self):
        with self.assertRaises(ConstellationError):
            propagate_ecef(self.constellation, -1, 1.0)

    def test_inclined_shells_reach_their_inclination(self):
        for inclination in (53.0, 90.0):
            with self.subTest(inclination=inclination):
                constellation = build_walker_delta([ShellParams(550.0, inclination, 4, 6)], PRIMARY)
                slots = np.arange(0, math.ceil(orbital_period(550.0)) + 1)
                positions = positions_at(constellation, slots, 1.0)
                radius = np.linalg.norm(positions, axis=-1)
                np.testing.assert_allclose(radius, EARTH_RADIUS_M + 550e3, rtol=1e-12)
                latitude = np.degrees(np.arcsin(positions[..., 2] / radius))
                self.assertAlmostEqual(latitude.max(), inclination, delta=0.05)
                self.assertAlmostEqual(latitude.min(), -inclination, delta=0.05)


class GeometryTestCase(SimpleTestCase):
    def setUp(self):
        self.ground = geodetic_to_ecef(0.0, 0.0)

    def test_geodetic_origin(self):
        np.testing.assert_allclose(self.ground, [EARTH_RADIUS_M, 0.0, 0.0])

    def test_zenith_and_horizon(self):
        above = self.ground * 1.1
        self.assertAlmostEqual(elevation_angle(self.ground, above), 90.0)
        beside = self.ground + np.array([0.0, 1e5, 0.0])
        self.assertAlmostEqual(elevation_angle(self.ground, beside), 0.0)

    def test_degenerate_points(self):
        with self.assertRaises(GeometryError):
            elevation_angle(np.zeros(3), self.ground)
        with self.assertRaises(GeometryError):
            elevation_angle(self.ground, self.ground)

    def test_table_matches_scalar(self):
        grounds = geodetic_to_ecef(np.array([0.0, 1.0, 2.0]), np.array([0.0, 0.5, -1.0]))
        sats = geodetic_to_ecef(np.array([0.5, -3.0]), np.array([0.0, 4.0]), 550e3)
        table = elevation_table(grounds, sats)
        for n in range(2):
            for g in range(3):
                self.assertAlmostEqual(table[n, g], elevation_angle(grounds[g], sats[n]), places=9)

    def test_overhead_sets(self):
        cells = geodetic_to_ecef(np.array([[0.0, 0.1]]), np.array([[0.0, 0.1]]))
        positions = np.array(
            [geodetic_to_ecef(0.0, 0.0, 550e3), geodetic_to_ecef(0.0, 180.0, 550e3)]
        )
        found = overhead_from_positions(positions, cells, 25.0)
        np.testing.assert_array_equal(found.members(0), [0])
        np.testing.assert_array_equal(found.union, [0])

    def test_overhead_sets_keep_satellite_ids(self):
        constellation = build_walker_delta([ShellParams(550.0, 0.0, 1, 4)], PRIMARY)
        states = propagate_ecef(constellation, 0, 1.0, earth_rotation=0.0)[1:]

        class Grid:
            cells = geodetic_to_ecef(np.array([[0.0]]), np.array([[90.0]]))

        found = overhead_sets(states, Grid(), 25.0)
        np.testing.assert_array_equal(found.per_cluster[0], [1])

    def test_rotating_ground_and_satellite_together(self):
        rng = np.random.default_rng(7)
        grounds = geodetic_to_ecef(rng.uniform(-80, 80, 20), rng.uniform(-180, 180, 20))
        sats = geodetic_to_ecef(rng.uniform(-80, 80, 20), rng.uniform(-180, 180, 20), 600e3)
        for _ in range(5):
            rotation, upper = np.linalg.qr(rng.normal(size=(3, 3)))
            rotation = rotation * np.sign(np.diag(upper))
            if np.linalg.det(rotation) < 0:
                rotation[:, 0] = -rotation[:, 0]
            for ground, sat in zip(grounds, sats):
                self.assertAlmostEqual(
                    elevation_angle(rotation @ ground, rotation @ sat),
                    elevation_angle(ground, sat),
                    places=9,
                )
            np.testing.assert_allclose(
                elevation_table(grounds @ rotation.T, sats @ rotation.T),
                elevation_table(grounds, sats),
                atol=1e-9,
            )

    def test_raising_eps_min_only_shrinks_overhead_sets(self):
        constellation = build_walker_delta([ShellParams(550.0, 53.0, 24, 22)], PRIMARY)
        cells = tiny_grid(((0.0, 0.0), (30.0, -97.0))).cells
        for slot in (0, 300, 600):
            positions = positions_at(constellation, slot, 1.0)
            previous = None
            for eps_min in (10.0, 20.0, 25.0, 35.0, 50.0, 80.0):
                found = overhead_from_positions(positions, cells, eps_min)
                if previous is None:
                    self.assertGreater(len(found.union), 0)
                else:
                    for members, wider in zip(found.per_cluster, previous.per_cluster):
                        self.assertTrue(set(members.tolist()) <= set(wider.tolist()))
                    self.assertTrue(set(found.union.tolist()) <= set(previous.union.tolist()))
                previous = found


class SnapshotCacheTestCase(SimpleTestCase):
    def setUp(self):
        constellation = build_walker_delta([ShellParams(550.0, 0.0, 1, 2)], PRIMARY)
        cells = geodetic_to_ecef(np.array([[0.0]]), np.array([[0.0]]))
        self.snapshots = SnapshotCache(constellation, cells, 25.0, 0.1, earth_rotation=0.0)

    def test_memoised(self):
        self.assertIs(self.snapshots.positions(4), self.snapshots.positions(4))
        self.assertIs(self.snapshots.overhead(4), self.snapshots.overhead(4))

    def test_track_matches_positions(self):
        track = self.snapshots.track([1], [0, 7])
        np.testing.assert_allclose(track[1, 0], self.snapshots.positions(7)[1])

    def test_visibility(self):
        np.testing.assert_array_equal(self.snapshots.visible(0, 0, [0, 1]), [True, True])
        np.testing.assert_array_equal(self.snapshots.visible(1, 0, [0, 1]), [False, False])

    def test_lookahead(self):
        self.assertEqual(self.snapshots.lookahead_slots(), math.ceil(orbital_period(550.0) / 0.1))


class PositionsDumpTestCase(SimpleTestCase):
    def test_positions_frame(self):
        constellation = build_walker_delta([ShellParams(550.0, 0.0, 1, 4)], PRIMARY)
        frame = positions_frame(constellation, [0, 10], 0.1, earth_rotation=0.0)
        self.assertEqual(list(frame.columns), POSITION_COLUMNS)
        self.assertEqual(len(frame), 8)
        np.testing.assert_allclose(frame["time_s"], [0.0] * 4 + [1.0] * 4)
        np.testing.assert_array_equal(frame["sat_id"], [0, 1, 2, 3] * 2)
        radius = np.linalg.norm(frame[["x_m", "y_m", "z_m"]].to_numpy(), axis=1)
        np.testing.assert_allclose(radius, EARTH_RADIUS_M + 550e3)
        self.assertAlmostEqual(frame["x_m"].iloc[0], EARTH_RADIUS_M + 550e3)

    def test_dump_positions_command(self):
        with tempfile.TemporaryDirectory() as folder:
            path = Path(folder, "tiny.scenario")
            path.write_text(
                "earth_rotation = false\n"
                "primary { shells = [[550.0, 0.0, 1, 1]] }\n"
                "secondary { shells = [[600.0, 0.0, 1, 2]] }\n"
            )
            stdout = StringIO()
            call_command(
                "dump_positions", scenario=str(path), duration_s=0.5, every_s=0.1, stdout=stdout
            )
            frame = pandas.read_csv(StringIO(stdout.getvalue()))
            self.assertEqual(list(frame.columns), POSITION_COLUMNS)
            self.assertEqual(len(frame), 6 * 3)
            self.assertEqual(sorted(frame["system"].unique()), [PRIMARY, SECONDARY])

            out = Path(folder, "positions.csv")
            call_command(
                "dump_positions",
                scenario=str(path),
                system=SECONDARY,
                out=str(out),
                stdout=StringIO(),
            )
            frame = pandas.read_csv(out)
            self.assertEqual(len(frame), 2)
            self.assertEqual(list(frame["system"].unique()), [SECONDARY])
