"""Parametric beam patterns for the satellite and ground phased arrays."""
import logging
from typing import List, NamedTuple

import numpy as np
import pandas

logger = logging.getLogger(__name__)


class PatternError(ValueError):
    """Base error for module"""


class AntennaPattern(NamedTuple):
    """Quadratic (in dB) mainlobe inside a two-level floor.

    beamwidth_3db is the off-boresight angle at which the gain is 3 dB below
    peak, so the mainlobe reads peak - 3 * (theta / beamwidth_3db) ** 2.
    """

    peak_gain: float  # dBi
    beamwidth_3db: float  # deg
    sidelobe_floor: float = 30.0  # dB below peak
    far_floor: float = 0.0  # dBi
    elements: int = 0  # metadata only

    @property
    def floor(self) -> float:
        return max(self.peak_gain - self.sidelobe_floor, self.far_floor)

    def problems(self) -> List[str]:
        found = []
        if not self.peak_gain > 0:
            found.append(f"peak_gain must be positive, got {self.peak_gain}")
        if not self.beamwidth_3db > 0:
            found.append(f"beamwidth_3db must be positive, got {self.beamwidth_3db}")
        if not self.sidelobe_floor > 3:
            found.append(
                f"sidelobe_floor must exceed 3 dB, got {self.sidelobe_floor}"
            )
        if self.far_floor > self.peak_gain:
            found.append("far_floor cannot exceed peak_gain")
        return found


# 64 x 64 satellite array and 32 x 32 user terminal.
SATELLITE_TX_PATTERN = AntennaPattern(36.0, 1.6, elements=64 * 64)
USER_RX_PATTERN = AntennaPattern(30.0, 3.2, elements=32 * 32)


def validate_pattern(pattern: AntennaPattern) -> AntennaPattern:
    problems = pattern.problems()
    if problems:
        raise PatternError("; ".join(problems))
    return pattern


def boresight_offset_angle(antenna_pos, boresight_target, eval_point) -> float:
    """Angle at the antenna between its boresight and an evaluation point.

    Raises:
        PatternError: if either point coincides with the antenna.
    """
    antenna_pos = np.asarray(antenna_pos, dtype=float)
    to_target = np.asarray(boresight_target, dtype=float) - antenna_pos
    to_point = np.asarray(eval_point, dtype=float) - antenna_pos
    target_norm, point_norm = np.linalg.norm(to_target), np.linalg.norm(to_point)
    if not (target_norm > 0 and point_norm > 0):
        raise PatternError("Boresight target and evaluation point must differ from the antenna position")
    cosine = np.dot(to_target, to_point) / (target_norm * point_norm)
    return float(np.degrees(np.arccos(np.clip(cosine, -1.0, 1.0))))


def pattern_gain(pattern: AntennaPattern, offset):
    """Gain in dBi at the given off-boresight angle(s) in degrees."""
    offset = np.asarray(offset, dtype=float)
    mainlobe = pattern.peak_gain - 3.0 * (offset / pattern.beamwidth_3db) ** 2
    gain = np.maximum(mainlobe, pattern.floor)
    return float(gain) if gain.ndim == 0 else gain


def sample_pattern(
    tx: AntennaPattern, rx: AntennaPattern, max_offset: float = 20.0, step: float = 0.05
) -> pandas.DataFrame:
    thetas = np.round(np.arange(0.0, max_offset + step / 2, step), 6)
    return pandas.DataFrame(
        {
            "theta_deg": thetas,
            "tx_gain_dbi": pattern_gain(tx, thetas),
            "rx_gain_dbi": pattern_gain(rx, thetas),
        }
    )
