"""Array form of the link budget, evaluated over blocks of slots.

A Transmission is one (satellite, cluster) pair of either system over a run
of slots: where the satellite is, which cells its beams point at, and
whether it transmits at all.
"""
from typing import NamedTuple

import numpy as np
from more_itertools import chunked

from antenna.patterns import pattern_gain
from linkbudget.links import controlled_eirp, free_space_path_loss
from linkbudget.params import LinkParams, SystemLink, db_to_linear
from orbits.geometry import unit

DEFAULT_CHUNK_SLOTS = 32


class Transmission(NamedTuple):
    system: SystemLink
    satellite: int
    cluster: int
    positions: np.ndarray  # (T, 3)
    beam_cells: np.ndarray  # (T, B) lit cell indices
    targets: np.ndarray  # (T, B, 3) lit cell centres
    beam_colors: np.ndarray  # (T, B)
    active: np.ndarray  # (T,) serving and above eps_min

    def __len__(self):
        return len(self.positions)


def _cosine_angle(a: np.ndarray, b: np.ndarray, subscripts: str) -> np.ndarray:
    cosine = np.einsum(subscripts, a, b)
    return np.degrees(np.arccos(np.clip(cosine, -1.0, 1.0)))


def _per_slot(values: np.ndarray, slots: int, trailing: int) -> np.ndarray:
    values = np.asarray(values)
    if values.ndim == trailing:
        return np.broadcast_to(values, (slots,) + values.shape)
    return values


def _block_inr(
    sat: np.ndarray,
    targets: np.ndarray,
    beam_colors: np.ndarray,
    receivers: np.ndarray,
    receiver_colors: np.ndarray,
    pointing: np.ndarray,
    link: LinkParams,
    interferer: SystemLink,
    victim: SystemLink,
) -> np.ndarray:
    to_rx = receivers - sat[:, None, :]
    d_rx = np.linalg.norm(to_rx, axis=-1)
    to_target = targets - sat[:, None, :]
    d_target = np.linalg.norm(to_target, axis=-1)

    tx_offset = _cosine_angle(
        to_rx / d_rx[..., None], to_target / d_target[..., None], "tuk,tbk->tub"
    )
    rx_offset = _cosine_angle(pointing, -to_rx / d_rx[..., None], "tuk,tuk->tu")

    beam_db = (
        controlled_eirp(interferer.tag, d_target, link, interferer.top_altitude)
        - interferer.tx_pattern.peak_gain
    )
    receiver_db = (
        pattern_gain(victim.rx_pattern, rx_offset)
        - free_space_path_loss(link.carrier, d_rx)
        - link.noise_density
    )
    inr_db = beam_db[:, None, :] + pattern_gain(interferer.tx_pattern, tx_offset) + receiver_db[..., None]

    above_horizon = np.einsum("tuk,tuk->tu", -to_rx, unit(receivers)) >= 0
    co_channel = receiver_colors[:, :, None] == beam_colors[:, None, :]
    return (db_to_linear(inr_db) * (co_channel & above_horizon[..., None])).sum(axis=-1)


def transmission_inr(
    transmission: Transmission,
    receivers: np.ndarray,
    receiver_colors: np.ndarray,
    pointing: np.ndarray,
    link: LinkParams,
    victim: SystemLink,
    chunk_slots: int = DEFAULT_CHUNK_SLOTS,
) -> np.ndarray:
    """Linear INR a transmission causes at every receiver and slot.

    Args:
        receivers: (U, 3) fixed or (T, U, 3) per-slot receiver positions.
        receiver_colors: (U,) or (T, U) reuse colours of the receivers.
        pointing: (T, U, 3) unit boresight directions of the receivers.

    Returns:
        (T, U) array; zero wherever the transmission is inactive.
    """
    slots = len(transmission)
    receivers = _per_slot(receivers, slots, 2)
    receiver_colors = _per_slot(receiver_colors, slots, 1)
    inr = np.zeros(receivers.shape[:2])
    for block in chunked(range(slots), chunk_slots):
        window = slice(block[0], block[-1] + 1)
        if not transmission.active[window].any():
            continue
        inr[window] = _block_inr(
            transmission.positions[window],
            transmission.targets[window],
            transmission.beam_colors[window],
            receivers[window],
            receiver_colors[window],
            pointing[window],
            link,
            transmission.system,
            victim,
        )
    return inr * transmission.active[:, None]


def served_snr_db(
    sat: np.ndarray, cells: np.ndarray, users: np.ndarray, link: LinkParams, system: SystemLink
) -> np.ndarray:
    """SNR in dB of users lit by the beam on their cell, receiver on boresight.

    Args:
        sat: (T, 3) serving satellite track.
        cells: (T, V, 3) centres of the users' cells.
        users: (T, V, 3) user positions.
    """
    to_cell = cells - sat[:, None, :]
    to_user = users - sat[:, None, :]
    d_cell = np.linalg.norm(to_cell, axis=-1)
    d_user = np.linalg.norm(to_user, axis=-1)
    tx_offset = _cosine_angle(
        to_cell / d_cell[..., None], to_user / d_user[..., None], "tvk,tvk->tv"
    )
    return (
        controlled_eirp(system.tag, d_cell, link, system.top_altitude)
        - system.tx_pattern.peak_gain
        + pattern_gain(system.tx_pattern, tx_offset)
        + system.rx_pattern.peak_gain
        - free_space_path_loss(link.carrier, d_user)
        - link.noise_density
    )
