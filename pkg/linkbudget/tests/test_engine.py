import math

import numpy as np
from django.test import SimpleTestCase

from association.sources import UNSERVED
from linkbudget.engine import LinkState, check_link_state
from linkbudget.links import reference_snr_db
from linkbudget.params import LinkBudgetError, db_to_linear
from orbits.geometry import unit
from project.testing import equatorial_shell, tiny_engine, tiny_grid


class LinkEngineTestCase(SimpleTestCase):
    def setUp(self):
        self.grid = tiny_grid()
        self.engine = tiny_engine(
            [equatorial_shell(550.0)],
            [equatorial_shell(600.0, sats=2, anomaly_offset=0.5)],
            self.grid,
        )
        self.slots = np.arange(10)
        self.users = self.grid.representative_users()

    def test_primary_table_follows_the_policy(self):
        table = self.engine.primary_table(self.slots)
        self.assertEqual(table.shape, (10, 1))
        self.assertTrue((table == 0).all())

    def test_transmission_visibility(self):
        overhead = self.engine.transmission(self.engine.secondary, 0, 0, self.slots)
        opposite = self.engine.transmission(self.engine.secondary, 1, 0, self.slots)
        self.assertTrue(overhead.active.all())
        self.assertFalse(opposite.active.any())
        self.assertEqual(overhead.targets.shape, (10, 16, 3))

    def test_serving_mask_limits_activity(self):
        serving = self.slots < 4
        transmission = self.engine.transmission(self.engine.secondary, 0, 0, self.slots, serving)
        np.testing.assert_array_equal(transmission.active, serving)

    def test_pointing(self):
        table = self.engine.primary_table(self.slots)
        pointing = self.engine.pointing(self.engine.primary, table, self.slots, self.users)
        track = self.engine.primary.snapshots.track([0], self.slots)[:, 0]
        np.testing.assert_allclose(pointing[3, 10], unit(track[3] - self.users.positions[10]))

        unserved = np.full_like(table, UNSERVED)
        zenith = self.engine.pointing(self.engine.primary, unserved, self.slots, self.users)
        np.testing.assert_allclose(zenith[0, 10], unit(self.users.positions[10]))

    def test_candidate_inr_is_a_single_term_interference_sum(self):
        table = self.engine.primary_table(self.slots)
        pointing = self.engine.pointing(self.engine.primary, table, self.slots, self.users)
        direct = self.engine.candidate_inr(0, 0, self.slots, self.users, pointing)
        transmission = self.engine.transmission(self.engine.secondary, 0, 0, self.slots)
        summed = self.engine.interference([transmission], self.users, pointing, self.engine.primary)
        np.testing.assert_array_equal(direct, summed)
        self.assertTrue((direct > 0).any())

    def test_capacity_without_interference(self):
        capacity = self.engine.cluster_capacity(0, 0, self.slots, primary_tx=[])
        snr = db_to_linear(reference_snr_db(self.engine.link, self.engine.secondary.link))
        self.assertAlmostEqual(capacity, 10 * 16 * math.log2(1 + snr), delta=1e-6 * capacity)

    def test_interference_lowers_capacity(self):
        clean = self.engine.cluster_capacity(0, 0, self.slots, primary_tx=[])
        loaded = self.engine.cluster_capacity(0, 0, self.slots)
        self.assertLess(loaded, clean)
        self.assertGreaterEqual(loaded, 0.0)

    def test_capacity_of_an_invisible_candidate(self):
        self.assertEqual(self.engine.cluster_capacity(1, 0, self.slots), 0.0)

    def test_link_state_of_primary_users(self):
        table = self.engine.primary_table(self.slots)
        own = self.engine.transmissions(self.engine.primary, table, self.slots)
        interferers = [self.engine.transmission(self.engine.secondary, 0, 0, self.slots)]
        state = self.engine.link_state(self.engine.primary, table, own, interferers, self.users, self.slots)
        np.testing.assert_array_equal(state.served.sum(axis=1), np.full(10, 16))
        self.assertTrue(np.all(state.sinr[state.served] < state.snr[state.served]))
        self.assertFalse(state.sinr[~state.served].any())


class CheckLinkStateTestCase(SimpleTestCase):
    def setUp(self):
        self.users = tiny_grid().representative_users()
        self.slots = np.arange(5, 8)
        self.table = np.zeros((3, 1), dtype=int)

    def state(self, snr=None, inr=None):
        shape = (len(self.slots), len(self.users))
        return LinkState(
            np.ones(shape, dtype=bool),
            np.ones(shape) if snr is None else snr,
            np.zeros(shape) if inr is None else inr,
        )

    def test_valid_state_passes(self):
        state = self.state()
        self.assertIs(check_link_state(state, self.table, self.users, self.slots), state)

    def test_names_the_first_bad_sample(self):
        inr = np.zeros((3, len(self.users)))
        inr[1, 4] = math.nan
        with self.assertRaisesMessage(LinkBudgetError, f"user {self.users.user_ids[4]} at slot 6"):
            check_link_state(self.state(inr=inr), self.table, self.users, self.slots)

    def test_negative_snr(self):
        snr = np.ones((3, len(self.users)))
        snr[2, 0] = -1.0
        with self.assertRaises(LinkBudgetError):
            check_link_state(self.state(snr=snr), self.table, self.users, self.slots)
