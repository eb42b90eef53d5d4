import math

import numpy as np
from django.test import SimpleTestCase

from linkbudget.params import db_to_linear
from protection.config import ProtectionConfig, ProtectionError, validate_protection
from protection.constraints import effective_avg_threshold, horizon_avg_inr, horizon_max_inr
from protection.history import InterferenceHistory
from protection.verification import VIOLATION_COLUMNS, verify_window


class ProtectionConfigTestCase(SimpleTestCase):
    def test_linear_thresholds(self):
        cfg = ProtectionConfig(-6.0, 3.0)
        self.assertAlmostEqual(cfg.avg_threshold, db_to_linear(-6.0))
        self.assertAlmostEqual(cfg.max_threshold, db_to_linear(3.0))
        self.assertEqual(ProtectionConfig().max_threshold, math.inf)
        self.assertEqual(cfg.window_length, 250)

    def test_invalid_configs_list_every_problem(self):
        cfg = ProtectionConfig(-6.0, -9.0, window_past=-1, handover_period=0)
        self.assertEqual(len(cfg.problems()), 3)
        with self.assertRaises(ProtectionError):
            validate_protection(cfg)

    def test_strict_mode_is_valid(self):
        self.assertEqual(validate_protection(ProtectionConfig(-6.0, -6.0)).problems(), [])


class InterferenceHistoryTestCase(SimpleTestCase):
    def test_zero_filled_before_start(self):
        history = InterferenceHistory(2, 4)
        history.append(0, [1.0, 2.0])
        np.testing.assert_array_equal(history.window(1, 3), [[0, 0], [0, 0], [1, 2]])

    def test_ring_wraps(self):
        history = InterferenceHistory(1, 3)
        history.extend(0, [[1.0], [2.0], [3.0], [4.0], [5.0]])
        np.testing.assert_array_equal(history.window_sum(5, 3), [12.0])
        with self.assertRaises(ProtectionError):
            history.window(5, 4)

    def test_rejects_bad_samples(self):
        history = InterferenceHistory(2, 4)
        with self.assertRaises(ProtectionError):
            history.append(1, [0.0, 0.0])
        with self.assertRaises(ProtectionError):
            history.append(0, [0.0, -1.0])
        with self.assertRaises(ProtectionError):
            history.append(0, [0.0, math.nan])
        with self.assertRaises(ProtectionError):
            history.window(2, 1)


class EffectiveThresholdTestCase(SimpleTestCase):
    def setUp(self):
        self.cfg = ProtectionConfig(-6.0, math.inf, window_past=100, handover_period=150)
        self.threshold = self.cfg.avg_threshold

    def test_empty_history(self):
        history = InterferenceHistory(3, 100)
        self.assertAlmostEqual(
            effective_avg_threshold(history, self.cfg, 0), 5.0 / 3.0 * self.threshold, places=12
        )

    def test_past_at_threshold(self):
        history = InterferenceHistory(3, 100)
        history.extend(0, np.tile([self.threshold, 0.0, 0.1 * self.threshold], (100, 1)))
        self.assertAlmostEqual(effective_avg_threshold(history, self.cfg, 100), self.threshold, places=12)

    def test_past_at_twice_threshold_with_equal_windows(self):
        cfg = self.cfg._replace(window_past=150)
        history = InterferenceHistory(1, 150)
        history.extend(0, np.full((150, 1), 2 * self.threshold))
        self.assertAlmostEqual(effective_avg_threshold(history, cfg, 150), 0.0, places=12)

    def test_decreases_with_worse_past(self):
        values = []
        for level in (0.0, 0.5, 1.0, 2.0, 4.0):
            history = InterferenceHistory(1, 100)
            history.extend(0, np.full((100, 1), level * self.threshold))
            values.append(effective_avg_threshold(history, self.cfg, 100))
        self.assertEqual(values, sorted(values, reverse=True))
        self.assertLess(values[-1], 0.0)


class HorizonTestCase(SimpleTestCase):
    def test_constant_profile(self):
        rows = np.full((150, 2), 0.3)
        np.testing.assert_allclose(horizon_avg_inr(rows, 150), [0.3, 0.3], rtol=1e-12)
        np.testing.assert_array_equal(horizon_max_inr(rows), [0.3, 0.3])

    def test_zero_contributions(self):
        rows = np.zeros((150, 2))
        np.testing.assert_array_equal(horizon_avg_inr(rows, 150), [0.0, 0.0])
        np.testing.assert_array_equal(horizon_max_inr(rows), [0.0, 0.0])
        np.testing.assert_array_equal(horizon_max_inr(np.zeros((0, 2))), [0.0, 0.0])

    def test_matches_loops(self):
        rng = np.random.default_rng(4)
        for _ in range(20):
            rows = rng.exponential(size=(rng.integers(1, 10), 3))
            period = len(rows) + int(rng.integers(0, 3))
            for user in range(3):
                total, peak = 0.0, 0.0
                for value in rows[:, user]:
                    total += value
                    peak = max(peak, value)
                self.assertAlmostEqual(horizon_avg_inr(rows, period)[user], total / period, delta=1e-12 * total)
                self.assertEqual(horizon_max_inr(rows)[user], peak)


class VerifyWindowTestCase(SimpleTestCase):
    def setUp(self):
        self.cfg = ProtectionConfig(-6.0, 0.0, window_past=100, handover_period=150)

    def test_all_zero_trace(self):
        report = verify_window(np.zeros((300, 3)), [0, 150], self.cfg)
        self.assertEqual(report.avg_flags, 0)
        self.assertEqual(report.abs_flags, 0)
        self.assertEqual(list(report.violations.columns), VIOLATION_COLUMNS)
        self.assertEqual(len(report.violations), 6)
        self.assertEqual(report.zero_filled, [0])

    def test_single_spike(self):
        trace = np.zeros((300, 3))
        trace[160, 1] = 2.0
        report = verify_window(trace, [0, 150], self.cfg, user_ids=[10, 11, 12])
        self.assertEqual(report.abs_flags, 1)
        self.assertEqual(report.avg_flags, 0)
        flagged = report.violations[report.violations["abs_violated"]]
        self.assertEqual(flagged[["handover_t", "user_id"]].values.tolist(), [[150, 11]])

    def test_sustained_interference_breaks_the_average(self):
        trace = np.full((300, 2), 2 * self.cfg.avg_threshold)
        report = verify_window(trace, [150], self.cfg._replace(inr_max_threshold_db=10.0))
        self.assertEqual(report.avg_flags, 2)
        self.assertEqual(report.abs_flags, 0)

    def test_truncated_windows_are_skipped(self):
        report = verify_window(np.zeros((200, 1)), [0, 150], self.cfg)
        self.assertEqual(report.violations["handover_t"].unique().tolist(), [0])

    def test_split_bound_is_never_below_the_realised_mean(self):
        rng = np.random.default_rng(9)
        trace = rng.exponential(0.1, size=(400, 5))
        report = verify_window(trace, [0, 150], self.cfg)
        self.assertTrue((report.gaps["gap"] >= 0).all())

    def test_matches_loop_oracle(self):
        rng = np.random.default_rng(11)
        cfg = ProtectionConfig(-6.0, 0.0, window_past=3, handover_period=4)
        trace = rng.exponential(0.3, size=(12, 2))
        report = verify_window(trace, [0, 4, 8], cfg)
        for row in report.violations.itertuples():
            t, user = row.handover_t, row.user_id
            values = [trace[s, user] if s >= 0 else 0.0 for s in range(t - 3, t + 4)]
            self.assertAlmostEqual(10 * math.log10(sum(values) / 7), row.avg_inr_db, places=9)
            self.assertAlmostEqual(10 * math.log10(max(trace[t : t + 4, user])), row.max_inr_db, places=9)
