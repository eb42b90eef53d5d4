import math

import numpy as np
from django.test import SimpleTestCase

from association.beams import BeamSchedule
from linkbudget.interference import Transmission, served_snr_db, transmission_inr
from linkbudget.links import link_snr, satellite_cluster_inr
from linkbudget.params import LinkParams, SystemLink, linear_to_db
from orbits.constants import EARTH_RADIUS_M, PRIMARY, SECONDARY
from orbits.geometry import unit
from project.testing import tiny_grid


def above(lat_deg, lon_deg, altitude_m):
    lat, lon = math.radians(lat_deg), math.radians(lon_deg)
    radius = EARTH_RADIUS_M + altitude_m
    return np.array(
        [radius * math.cos(lat) * math.cos(lon), radius * math.cos(lat) * math.sin(lon), radius * math.sin(lat)]
    )


class TransmissionInrTestCase(SimpleTestCase):
    def setUp(self):
        self.link = LinkParams()
        self.primary = SystemLink(PRIMARY, 570e3)
        self.secondary = SystemLink(SECONDARY, 630e3)
        self.grid = tiny_grid()
        self.users = self.grid.representative_users()
        self.schedule = BeamSchedule(16)
        self.slots = np.array([0, 1, 2])
        self.serving = above(0.05, 0.0, 550e3)
        self.positions = np.stack([above(0.3, -0.2 + 0.05 * t, 600e3) for t in self.slots])

    def transmission(self, active):
        cells = self.schedule.active_matrix(self.slots)
        return Transmission(
            self.secondary,
            0,
            0,
            self.positions,
            cells,
            self.grid.cells[0][cells],
            self.grid.colors[0][cells],
            np.asarray(active),
        )

    def pointing(self):
        toward = unit(self.serving - self.users.positions)
        return np.broadcast_to(toward, (len(self.slots),) + toward.shape)

    def test_matches_scalar_evaluation(self):
        inr = transmission_inr(
            self.transmission([True, True, True]),
            self.users.positions,
            self.users.colors,
            self.pointing(),
            self.link,
            self.primary,
            chunk_slots=2,
        )
        self.assertEqual(inr.shape, (3, len(self.users)))
        for t in self.slots:
            for user in list(self.users.users())[::7]:
                expected = satellite_cluster_inr(
                    user, self.serving, self.positions[t], 0, self.grid, self.schedule, t,
                    self.link, self.secondary, self.primary,
                )
                self.assertAlmostEqual(inr[t, user.user_id], expected, delta=1e-9 * expected)

    def test_inactive_slots_are_silent(self):
        inr = transmission_inr(
            self.transmission([True, False, True]),
            self.users.positions,
            self.users.colors,
            self.pointing(),
            self.link,
            self.primary,
        )
        self.assertFalse(inr[1].any())
        self.assertTrue(inr[0].any())

    def test_receivers_below_the_horizon_are_spared(self):
        positions = np.stack([above(0.0, 180.0, 600e3)] * 3)
        transmission = self.transmission([True] * 3)._replace(positions=positions)
        inr = transmission_inr(
            transmission, self.users.positions, self.users.colors, self.pointing(), self.link, self.primary
        )
        self.assertFalse(inr.any())

    def test_chunking_does_not_change_values(self):
        args = (self.users.positions, self.users.colors, self.pointing(), self.link, self.primary)
        whole = transmission_inr(self.transmission([True] * 3), *args, chunk_slots=32)
        pieces = transmission_inr(self.transmission([True] * 3), *args, chunk_slots=1)
        np.testing.assert_array_equal(whole, pieces)


class ServedSnrTestCase(SimpleTestCase):
    def test_agrees_with_scalar_snr(self):
        link = LinkParams()
        system = SystemLink(PRIMARY, 570e3)
        sat = np.stack([above(0.0, 0.1, 560e3)])
        cell = above(0.0, 0.0, 0.0)
        user = above(0.02, 0.03, 0.0)
        vectorised = served_snr_db(sat, cell[None, None], user[None, None], link, system)[0, 0]
        scalar = linear_to_db(link_snr(user, sat[0], cell, link, system))
        self.assertAlmostEqual(vectorised, scalar, places=6)
