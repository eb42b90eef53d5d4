"""Scalar link-budget relations.

Everything here works on one user, one satellite and one slot at a time;
linkbudget.interference evaluates the same relations over whole arrays.
"""
import logging

import numpy as np

from antenna.patterns import boresight_offset_angle, pattern_gain
from association.beams import BeamSchedule
from association.grid import CellGrid, User
from association.matrix import AssociationMatrix
from linkbudget.params import (
    BelowMinimumElevation,
    LinkBudgetError,
    LinkParams,
    SystemLink,
    db_to_linear,
)
from orbits.geometry import elevation_angle

logger = logging.getLogger(__name__)

FSPL_CONSTANT = 32.45


def free_space_path_loss(f, d):
    """Path loss in dB for a carrier in GHz over a distance in metres."""
    f = np.asarray(f, dtype=float)
    d = np.asarray(d, dtype=float)
    if np.any(f <= 0) or np.any(d <= 0):
        raise LinkBudgetError("Carrier and distance must be positive")
    loss = FSPL_CONSTANT + 20.0 * np.log10(f) + 20.0 * np.log10(d)
    return float(loss) if loss.ndim == 0 else loss


def controlled_eirp(system_tag: str, slant_distance, link: LinkParams, top_altitude: float):
    """EIRP density (dBW/Hz) that holds the ground PSD at its nadir-at-top value."""
    eirp = link.max_eirp_for(system_tag) + 20.0 * np.log10(
        np.asarray(slant_distance, dtype=float) / top_altitude
    )
    return float(eirp) if np.ndim(eirp) == 0 else eirp


def reference_snr_db(link: LinkParams, system: SystemLink) -> float:
    """SNR of a cell-centre user, independent of slant range under power control."""
    d = system.top_altitude
    return (
        controlled_eirp(system.tag, d, link, system.top_altitude)
        + system.rx_pattern.peak_gain
        - free_space_path_loss(link.carrier, d)
        - link.noise_density
    )


def link_snr(
    user_pos,
    serving_pos,
    cell_pos,
    link: LinkParams,
    system: SystemLink,
    rx_offset: float = 0.0,
) -> float:
    """Linear SNR of a user served by the beam aimed at its cell centre.

    Args:
        rx_offset: angle between the user's boresight and its server, degrees.

    Raises:
        BelowMinimumElevation: if the server is below the system's eps_min.
    """
    elevation = elevation_angle(user_pos, serving_pos)
    if elevation < link.eps_min_for(system.tag):
        raise BelowMinimumElevation(
            f"{system.tag} server at {elevation:.2f} deg is below eps_min"
        )
    user_pos = np.asarray(user_pos, dtype=float)
    serving_pos = np.asarray(serving_pos, dtype=float)
    cell_pos = np.asarray(cell_pos, dtype=float)
    eirp = controlled_eirp(
        system.tag, np.linalg.norm(serving_pos - cell_pos), link, system.top_altitude
    )
    tx_offset = (
        0.0
        if np.allclose(user_pos, cell_pos)
        else boresight_offset_angle(serving_pos, cell_pos, user_pos)
    )
    snr_db = (
        eirp
        - system.tx_pattern.peak_gain
        + pattern_gain(system.tx_pattern, tx_offset)
        + pattern_gain(system.rx_pattern, rx_offset)
        - free_space_path_loss(link.carrier, np.linalg.norm(serving_pos - user_pos))
        - link.noise_density
    )
    return db_to_linear(snr_db)


def beam_inr(
    user_pos,
    serving_pos,
    interferer_pos,
    interferer_cell,
    link: LinkParams,
    interferer: SystemLink,
    victim: SystemLink,
) -> float:
    """Linear INR one active beam inflicts on a user of the other system.

    The interferer's gain is taken toward the user from the beam's boresight
    (its cell centre); the user's gain toward the interferer from its own
    serving direction. A satellite below the user's horizon contributes 0.
    """
    if elevation_angle(user_pos, interferer_pos) < 0:
        return 0.0
    interferer_pos = np.asarray(interferer_pos, dtype=float)
    eirp = controlled_eirp(
        interferer.tag,
        np.linalg.norm(interferer_pos - np.asarray(interferer_cell, dtype=float)),
        link,
        interferer.top_altitude,
    )
    tx_offset = boresight_offset_angle(interferer_pos, interferer_cell, user_pos)
    rx_offset = boresight_offset_angle(user_pos, serving_pos, interferer_pos)
    inr_db = (
        eirp
        - interferer.tx_pattern.peak_gain
        + pattern_gain(interferer.tx_pattern, tx_offset)
        + pattern_gain(victim.rx_pattern, rx_offset)
        - free_space_path_loss(
            link.carrier, np.linalg.norm(interferer_pos - np.asarray(user_pos, dtype=float))
        )
        - link.noise_density
    )
    return db_to_linear(inr_db)


def satellite_cluster_inr(
    user: User,
    serving_pos,
    sat_pos,
    cluster: int,
    grid: CellGrid,
    schedule: BeamSchedule,
    slot: int,
    link: LinkParams,
    interferer: SystemLink,
    victim: SystemLink,
) -> float:
    """Sum of beam_inr over the satellite's active beams co-channel with the user."""
    total = 0.0
    for cell in schedule.active(slot):
        if grid.colors[cluster, cell] != user.color:
            continue
        total += beam_inr(
            user.position,
            serving_pos,
            sat_pos,
            grid.cells[cluster, cell],
            link,
            interferer,
            victim,
        )
    return total


def aggregate_inr(
    user: User,
    serving_pos,
    association: AssociationMatrix,
    sat_positions: np.ndarray,
    grid: CellGrid,
    schedule: BeamSchedule,
    slot: int,
    link: LinkParams,
    interferer: SystemLink,
    victim: SystemLink,
) -> float:
    """Total INR at a user from every (satellite, cluster) pair of an association."""
    return sum(
        satellite_cluster_inr(
            user,
            serving_pos,
            sat_positions[satellite],
            cluster,
            grid,
            schedule,
            slot,
            link,
            interferer,
            victim,
        )
        for satellite, cluster in association.pairs()
    )


def link_sinr(snr, inr):
    """SNR / (1 + INR), both linear."""
    snr = np.asarray(snr, dtype=float)
    inr = np.asarray(inr, dtype=float)
    if np.any(snr < 0) or np.any(inr < 0):
        raise LinkBudgetError("SNR and INR must be non-negative")
    sinr = snr / (1.0 + inr)
    return float(sinr) if sinr.ndim == 0 else sinr


def capacity_sum(sinr, served=None, visible=None) -> float:
    """Sum of log2(1 + SINR) over slots and served users, in bits/s/Hz.

    Args:
        sinr: (T, V) linear SINR of the users a satellite could serve.
        served: optional (T, V) mask of users actually lit.
        visible: optional (T,) mask; slots where the satellite is below
            eps_min contribute nothing.
    """
    sinr = np.asarray(sinr, dtype=float)
    terms = np.log2(1.0 + sinr)
    if served is not None:
        terms = terms * np.asarray(served, dtype=bool)
    if visible is not None:
        terms = terms * np.asarray(visible, dtype=bool).reshape(-1, *([1] * (terms.ndim - 1)))
    return float(terms.sum())
