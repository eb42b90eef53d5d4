import math

import numpy as np
from django.test import SimpleTestCase

from association.matrix import AssociationMatrix
from association.sources import UNSERVED
from linkbudget.engine import LinkState
from metrics.distributions import association_lifetimes, empirical_cdf, lifetime_histogram
from metrics.rates import (
    MetricsError,
    exceedance,
    per_user_violation,
    utilization,
    violation_rate,
    violation_rate_series,
)
from metrics.report import INR, RANDOM, REPRESENTATIVE, SINR, MetricsCollector
from orbits.constants import PRIMARY, SECONDARY
from project.testing import tiny_grid


class ViolationRateTestCase(SimpleTestCase):
    def test_all_below(self):
        self.assertEqual(violation_rate([0.01, 0.02, 0.1], -6.0), 0.0)

    def test_half_above(self):
        self.assertEqual(violation_rate([0.1, 0.5, 0.1, 0.9], -6.0), 0.5)

    def test_strictly_above(self):
        self.assertEqual(violation_rate([1.0], 0.0), 0.0)

    def test_infinite_thresholds(self):
        self.assertEqual(violation_rate([0.1, 100.0], math.inf), 0.0)
        self.assertEqual(violation_rate([1e-9, 2.0], -math.inf), 1.0)
        self.assertEqual(violation_rate([], -6.0), 0.0)

    def test_series_and_per_user(self):
        trace = np.array([[0.0, 1.0], [0.0, 0.1], [0.0, 0.1], [0.0, 0.1]])
        np.testing.assert_array_equal(violation_rate_series(trace, -6.0), [0.5, 0.0, 0.0, 0.0])
        np.testing.assert_array_equal(per_user_violation(trace, -6.0), [0.0, 0.25])
        np.testing.assert_array_equal(per_user_violation(np.zeros((0, 3)), -6.0), [0.0, 0.0, 0.0])

    def test_rejects_bad_traces(self):
        with self.assertRaises(MetricsError):
            violation_rate([float("nan")], -6.0)
        with self.assertRaises(MetricsError):
            violation_rate_series(np.zeros(4), -6.0)

    def test_exceedance(self):
        self.assertEqual(exceedance([-20.0, -10.0, -5.0, -12.2], -12.2), 0.5)


class UtilizationTestCase(SimpleTestCase):
    def test_counts(self):
        self.assertEqual(utilization(AssociationMatrix((1, 2, 3), SECONDARY)), 1.0)
        self.assertEqual(utilization(AssociationMatrix.empty(4, SECONDARY)), 0.0)
        served = AssociationMatrix(tuple(range(7)) + (None,) * 3, SECONDARY)
        self.assertAlmostEqual(utilization(served), 0.7)
        self.assertAlmostEqual(utilization(served), 1 - len(served.unserved()) / 10)


class EmpiricalCdfTestCase(SimpleTestCase):
    def test_single_sample(self):
        cdf = empirical_cdf([-3.0])
        self.assertEqual(list(cdf.itertuples(index=False, name=None)), [(-3.0, 1.0)])

    def test_two_samples(self):
        cdf = empirical_cdf([-10.0, -20.0])
        np.testing.assert_array_equal(cdf["value"], [-20.0, -10.0])
        np.testing.assert_array_equal(cdf["fraction"], [0.5, 1.0])

    def test_ties_and_permutations(self):
        rng = np.random.default_rng(2)
        samples = rng.integers(-30, 0, size=200).astype(float)
        cdf = empirical_cdf(samples)
        shuffled = empirical_cdf(rng.permutation(samples))
        self.assertTrue(cdf.equals(shuffled))
        self.assertTrue(np.all(np.diff(cdf["fraction"]) > 0))
        self.assertEqual(cdf["fraction"].iloc[-1], 1.0)
        self.assertEqual(len(cdf), len(np.unique(samples)))

    def test_empty_and_nan(self):
        self.assertEqual(list(empirical_cdf([]).columns), ["value", "fraction"])
        with self.assertRaises(MetricsError):
            empirical_cdf([1.0, float("nan")])


class LifetimeTestCase(SimpleTestCase):
    def test_runs(self):
        table = np.array([[3, UNSERVED], [3, 5], [4, 5], [4, 5], [4, UNSERVED], [7, UNSERVED]])
        lifetimes = association_lifetimes(table, PRIMARY, 0.5)
        rows = list(lifetimes.itertuples(index=False, name=None))
        self.assertEqual(
            rows,
            [
                (PRIMARY, 0, 3, 0.0, 1.0, False),
                (PRIMARY, 0, 4, 1.0, 1.5, True),
                (PRIMARY, 0, 7, 2.5, 0.5, False),
                (PRIMARY, 1, 5, 0.5, 1.5, True),
            ],
        )
        histogram = lifetime_histogram(lifetimes, bin_s=1.0)
        self.assertEqual(list(histogram["bin_start_s"]), [1.0])
        self.assertEqual(list(histogram["count"]), [2])

    def test_nothing_complete(self):
        lifetimes = association_lifetimes(np.full((3, 2), UNSERVED), SECONDARY, 0.1)
        self.assertTrue(lifetimes.empty)
        self.assertTrue(lifetime_histogram(lifetimes).empty)


class CollectorTestCase(SimpleTestCase):
    def setUp(self):
        users = tiny_grid().representative_users()
        mask = np.zeros(len(users), dtype=bool)
        mask[:2] = True
        self.users = users._replace(representative=mask)

    def state(self, inr, served=None):
        inr = np.asarray(inr, dtype=float)
        served = np.ones(inr.shape, dtype=bool) if served is None else served
        return LinkState(served, np.full(inr.shape, 10.0), inr)

    def test_report(self):
        collector = MetricsCollector(-6.0, 0.1, self.users)
        inr = np.zeros((2, len(self.users)))
        inr[0, 0] = 1.0
        collector.record_block([0, 1], self.state(inr))
        collector.record_handover(0, AssociationMatrix((None,), SECONDARY))
        report = collector.finish()

        np.testing.assert_array_equal(report.violation_rate["violation_rate"], [0.5, 0.0])
        np.testing.assert_array_equal(report.violation_rate["time_s"], [0.0, 0.1])
        np.testing.assert_array_equal(report.per_user_violation["violation_fraction"], [0.5, 0.0])
        self.assertEqual(report.primary_trace.shape, (2, 2))
        self.assertEqual(report.utilization["outage_clusters"].tolist(), ["0"])
        self.assertEqual(report.pool(PRIMARY, REPRESENTATIVE, INR).size, 4)
        self.assertEqual(report.pool(PRIMARY, RANDOM, INR).size, 2 * (len(self.users) - 2))
        np.testing.assert_allclose(report.pool(PRIMARY, REPRESENTATIVE, SINR), [5.0, 10.0, 10.0, 10.0])

        summary = report.summary()
        self.assertEqual(summary["mean_violation_rate"], 0.25)
        self.assertEqual(summary["mean_utilization"], 0.0)
        self.assertEqual(summary["fraction_above_reference"], 0.25)

        cdf = report.inr_cdf()
        self.assertEqual(list(cdf.columns), ["system", "pool", "inr_db", "fraction"])
        self.assertEqual(set(cdf["pool"]), {REPRESENTATIVE, RANDOM})

    def test_unserved_users_have_no_sinr(self):
        collector = MetricsCollector(-6.0, 0.1, self.users)
        served = np.zeros((1, len(self.users)), dtype=bool)
        collector.record_block([0], self.state(np.zeros((1, len(self.users))), served))
        report = collector.finish()
        self.assertEqual(report.pool(PRIMARY, REPRESENTATIVE, SINR).size, 0)
        self.assertTrue(report.sinr_cdf().empty)

    def test_empty_report(self):
        report = MetricsCollector(-6.0, 0.1, self.users).finish()
        self.assertTrue(report.violation_rate.empty)
        self.assertTrue(report.utilization.empty)
        self.assertEqual(list(report.per_user_violation["violation_fraction"]), [0.0, 0.0])
        self.assertEqual(report.summary()["mean_utilization"], 0.0)

    def test_rejects_non_finite_samples(self):
        collector = MetricsCollector(-6.0, 0.1, self.users)
        inr = np.full((1, len(self.users)), np.inf)
        with self.assertRaises(MetricsError):
            collector.record_block([0], self.state(inr))
