from typing import List, NamedTuple, Optional

import numpy as np

from antenna.patterns import SATELLITE_TX_PATTERN, USER_RX_PATTERN, AntennaPattern
from orbits.constants import PRIMARY, SECONDARY


class LinkBudgetError(ValueError):
    """Base error for module"""


class BelowMinimumElevation(LinkBudgetError):
    """The serving satellite is below the minimum elevation angle."""


class LinkParams(NamedTuple):
    carrier: float = 20.0  # GHz
    primary_max_eirp: float = -54.3  # dBW/Hz
    secondary_max_eirp: float = -53.3  # dBW/Hz
    noise_psd: float = -174.0  # dBm/Hz
    noise_figure: float = 1.2  # dB
    primary_eps_min: float = 25.0  # deg
    secondary_eps_min: float = 25.0  # deg

    @property
    def noise_density(self) -> float:
        """Receiver noise in dBW/Hz."""
        return self.noise_psd - 30.0 + self.noise_figure

    def max_eirp_for(self, system_tag: str) -> float:
        return {PRIMARY: self.primary_max_eirp, SECONDARY: self.secondary_max_eirp}[
            system_tag
        ]

    def eps_min_for(self, system_tag: str) -> float:
        return {PRIMARY: self.primary_eps_min, SECONDARY: self.secondary_eps_min}[
            system_tag
        ]

    def problems(self) -> List[str]:
        found = []
        if not self.carrier > 0:
            found.append(f"carrier must be positive, got {self.carrier}")
        if self.noise_figure < 0:
            found.append(f"noise_figure cannot be negative, got {self.noise_figure}")
        return found


class SystemLink(NamedTuple):
    """Per-system radio parameters the interference maths needs."""

    tag: str
    top_altitude: float  # metres, highest shell of the system
    tx_pattern: AntennaPattern = SATELLITE_TX_PATTERN
    rx_pattern: AntennaPattern = USER_RX_PATTERN


def db_to_linear(value):
    linear = np.power(10.0, np.asarray(value, dtype=float) / 10.0)
    return float(linear) if linear.ndim == 0 else linear


def linear_to_db(value):
    with np.errstate(divide="ignore"):
        decibels = 10.0 * np.log10(np.asarray(value, dtype=float))
    return float(decibels) if decibels.ndim == 0 else decibels


class LinkSample(NamedTuple):
    """One SNR, INR or SINR value and where it was measured."""

    value: float  # linear
    user_id: int
    serving: Optional[int]
    interferer: Optional[int]
    slot: int

    @classmethod
    def checked(cls, value, user_id, serving, interferer, slot) -> "LinkSample":
        if not (np.isfinite(value) and value >= 0):
            raise LinkBudgetError(f"Link sample for user {user_id} at slot {slot} is {value}")
        return cls(float(value), int(user_id), serving, interferer, int(slot))
