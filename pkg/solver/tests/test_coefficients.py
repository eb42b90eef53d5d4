import numpy as np
from django.test import SimpleTestCase

from association.matrix import AssociationMatrix
from association.sources import TraceAssociationSource, association_frame
from orbits.constants import PRIMARY
from project.testing import SLOT_DURATION, equatorial_shell, tiny_engine, tiny_grid
from solver.coefficients import CoefficientError, build_coefficients, coefficient_table


class CoefficientTableTestCase(SimpleTestCase):
    def test_horizon_statistics(self):
        slot_inr = np.array([[[1.0, 0.0], [3.0, 2.0]]])
        coeffs = coefficient_table(4, 1, [0], [9], [2.5], slot_inr, handover_period=4)
        np.testing.assert_allclose(coeffs.avg_inr, [[1.0, 0.5]])
        np.testing.assert_allclose(coeffs.peak_inr, [[3.0, 2.0]])
        np.testing.assert_allclose(coeffs.mean_slot, [1.5])
        np.testing.assert_array_equal(coeffs.satellite_ids, [9])
        self.assertEqual(coeffs.users, 2)

    def test_empty_table(self):
        coeffs = coefficient_table(0, 2, [], [], [], np.zeros((0, 5, 3)), handover_period=5)
        self.assertEqual(len(coeffs), 0)
        self.assertEqual(coeffs.avg_inr.shape, (0, 3))
        self.assertEqual(len(coeffs.of_cluster(1)), 0)

    def test_rejects_bad_input(self):
        with self.assertRaises(CoefficientError):
            coefficient_table(0, 1, [0], [0], [1.0], np.zeros((1, 2)), handover_period=2)
        with self.assertRaises(CoefficientError):
            coefficient_table(0, 1, [0], [0], [-1.0], np.zeros((1, 2, 1)), handover_period=2)


class BuildCoefficientsTestCase(SimpleTestCase):
    def setUp(self):
        self.grid = tiny_grid()
        self.users = self.grid.representative_users()
        self.engine = tiny_engine(
            [equatorial_shell(550.0)],
            [equatorial_shell(600.0, sats=2, anomaly_offset=0.5)],
            self.grid,
        )

    def test_matches_the_link_engine(self):
        coeffs = build_coefficients(0, self.engine, self.users, handover_period=10)
        np.testing.assert_array_equal(coeffs.clusters, [0])
        np.testing.assert_array_equal(coeffs.satellites, [0])

        slots = np.arange(10)
        table = self.engine.primary_table(slots)
        pointing = self.engine.pointing(self.engine.primary, table, slots, self.users)
        inr = self.engine.candidate_inr(0, 0, slots, self.users, pointing)
        np.testing.assert_allclose(coeffs.slot_inr[0], inr)
        np.testing.assert_allclose(coeffs.avg_inr[0], inr.sum(axis=0) / 10)
        self.assertAlmostEqual(coeffs.capacity[0], self.engine.cluster_capacity(0, 0, slots))

    def test_window_is_cut_at_the_end_of_the_run(self):
        coeffs = build_coefficients(0, self.engine, self.users, handover_period=10, end_slot=4)
        self.assertEqual(coeffs.slot_inr.shape, (1, 4, len(self.users)))
        np.testing.assert_allclose(coeffs.avg_inr[0], coeffs.slot_inr[0].sum(axis=0) / 10)

    def test_slot_rows_can_be_dropped(self):
        coeffs = build_coefficients(0, self.engine, self.users, 10, keep_slot_inr=False)
        self.assertIsNone(coeffs.slot_inr)
        self.assertEqual(coeffs.peak_inr.shape, (1, len(self.users)))

    def test_nothing_overhead(self):
        engine = tiny_engine(
            [equatorial_shell(550.0)], [equatorial_shell(600.0, anomaly_offset=180.0)], self.grid
        )
        coeffs = build_coefficients(0, engine, self.users, handover_period=5)
        self.assertEqual(len(coeffs), 0)
        self.assertEqual(coeffs.n_clusters, 1)

    def test_primary_trace_gap(self):
        frame = association_frame([AssociationMatrix((0,), PRIMARY)], [0], SLOT_DURATION)
        self.engine.primary_source = TraceAssociationSource(frame, self.grid, PRIMARY, SLOT_DURATION)
        with self.assertRaises(CoefficientError):
            build_coefficients(0, self.engine, self.users, handover_period=5)
