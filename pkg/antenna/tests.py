from io import StringIO

import numpy as np
import pandas
from django.core.management import CommandError, call_command
from django.test import SimpleTestCase

from antenna.patterns import (
    SATELLITE_TX_PATTERN,
    USER_RX_PATTERN,
    AntennaPattern,
    PatternError,
    boresight_offset_angle,
    pattern_gain,
    sample_pattern,
    validate_pattern,
)


class PatternGainTestCase(SimpleTestCase):
    def test_peak_on_boresight(self):
        self.assertEqual(pattern_gain(SATELLITE_TX_PATTERN, 0.0), 36.0)
        self.assertEqual(pattern_gain(USER_RX_PATTERN, 0.0), 30.0)

    def test_half_power_at_beamwidth(self):
        self.assertAlmostEqual(pattern_gain(SATELLITE_TX_PATTERN, 1.6), 33.0)
        self.assertAlmostEqual(pattern_gain(USER_RX_PATTERN, 3.2), 27.0)

    def test_floor(self):
        self.assertEqual(pattern_gain(SATELLITE_TX_PATTERN, 60.0), 6.0)
        self.assertEqual(pattern_gain(AntennaPattern(20.0, 2.0), 60.0), 0.0)

    def test_monotone_and_vectorised(self):
        offsets = np.linspace(0.0, 30.0, 301)
        gains = pattern_gain(USER_RX_PATTERN, offsets)
        self.assertEqual(gains.shape, offsets.shape)
        self.assertTrue(np.all(np.diff(gains) <= 0))
        self.assertAlmostEqual(gains[16], pattern_gain(USER_RX_PATTERN, offsets[16]))

    def test_validation(self):
        self.assertIs(validate_pattern(SATELLITE_TX_PATTERN), SATELLITE_TX_PATTERN)
        with self.assertRaises(PatternError):
            validate_pattern(AntennaPattern(36.0, 0.0))
        with self.assertRaises(PatternError):
            validate_pattern(AntennaPattern(10.0, 1.0, far_floor=12.0))


class OffsetAngleTestCase(SimpleTestCase):
    def test_right_angle(self):
        self.assertAlmostEqual(boresight_offset_angle([0, 0, 0], [1, 0, 0], [0, 5, 0]), 90.0)

    def test_on_axis(self):
        self.assertAlmostEqual(boresight_offset_angle([1, 1, 1], [2, 2, 2], [9, 9, 9]), 0.0, places=5)

    def test_coincident_points(self):
        with self.assertRaises(PatternError):
            boresight_offset_angle([0, 0, 0], [0, 0, 0], [1, 0, 0])


class SamplePatternTestCase(SimpleTestCase):
    def test_columns(self):
        frame = sample_pattern(SATELLITE_TX_PATTERN, USER_RX_PATTERN)
        self.assertEqual(list(frame.columns), ["theta_deg", "tx_gain_dbi", "rx_gain_dbi"])
        self.assertEqual(len(frame), 401)
        self.assertEqual(frame["theta_deg"].iloc[-1], 20.0)
        self.assertEqual(frame["tx_gain_dbi"].iloc[0], 36.0)


class DumpPatternCommandTestCase(SimpleTestCase):
    def test_default_patterns(self):
        stdout = StringIO()
        call_command(
            "dump_pattern", scenario="small_region", max_offset_deg=2.0, step_deg=0.5, stdout=stdout
        )
        frame = pandas.read_csv(StringIO(stdout.getvalue()))
        self.assertEqual(list(frame.columns), ["theta_deg", "tx_gain_dbi", "rx_gain_dbi"])
        np.testing.assert_allclose(frame["theta_deg"], [0.0, 0.5, 1.0, 1.5, 2.0])
        self.assertEqual(frame["tx_gain_dbi"].iloc[0], 36.0)
        self.assertEqual(frame["rx_gain_dbi"].iloc[0], 30.0)

    def test_bad_range(self):
        with self.assertRaises(CommandError):
            call_command("dump_pattern", step_deg=0.0, stdout=StringIO())
