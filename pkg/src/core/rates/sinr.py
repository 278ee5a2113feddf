"""SINR and sum-rate arithmetic.

Tensors are indexed ``[user, bs, band]``. ``p`` denotes per-link powers
``p[u, b, k]``; ``p_uk`` denotes per-user-band powers ``P[u, k]``.

Interference is summed over the interfering terms directly, never taken as a
total minus the wanted signal.
"""

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from src.core.cells.partition import VirtualCellPartition
from src.core.rates.view import CellView
from src.models.allocation import ChannelAssignment
from src.models.experiment import EvalMode
from src.models.system import ChannelRealization


def _leave_one_out(size: int) -> np.ndarray:
    return 1.0 - np.eye(size)


def other_user_power(gain: np.ndarray, p_uk: np.ndarray) -> np.ndarray:
    """``(U, B, K)`` power of all other users received at each BS and band."""
    gain = np.asarray(gain, dtype=float)
    return np.einsum("uv,vbk,vk->ubk", _leave_one_out(gain.shape[0]), gain, np.asarray(p_uk, dtype=float))


def link_interference(gain: np.ndarray, p: np.ndarray) -> np.ndarray:
    """``(U, B, K)`` interference of every link for per-link powers.

    Link (u, b) hears every other user at BS b plus what user u itself sends
    towards the other BSs on that band.
    """
    gain = np.asarray(gain, dtype=float)
    p = np.asarray(p, dtype=float)
    own_elsewhere = np.einsum("cb,uck->ubk", _leave_one_out(gain.shape[1]), p)
    return other_user_power(gain, p.sum(axis=1)) + gain * own_elsewhere


def sinr(view: CellView, p: np.ndarray) -> np.ndarray:
    """Per-link SINR for per-link powers.

    The interference seen by link (u, b) is everything else received at BS b
    on that band, including what user u itself sends towards other BSs.
    """
    p = np.asarray(p, dtype=float)
    signal = view.gain * p
    return signal / (view.noise[None, :, :] + link_interference(view.gain, p))


def intra_cell_interference(view: CellView, p_uk: np.ndarray) -> np.ndarray:
    """``J[u, b, k]``: power from the other users of the cell received at BS b."""
    return other_user_power(view.gain, p_uk)


def per_user_band_sinr(view: CellView, p_uk: np.ndarray) -> np.ndarray:
    """SINR of user u at BS b on band k when u sends all of ``P[u, k]`` to b."""
    p_uk = np.asarray(p_uk, dtype=float)
    signal = view.gain * p_uk[:, None, :]
    return signal / (view.noise[None, :, :] + intra_cell_interference(view, p_uk))


def cell_sum_rate(view: CellView, gamma, p_uk: np.ndarray) -> float:
    """Sum over assigned links of ``W_k log2(1 + SINR)`` in bits/s.

    Args:
        view: Cell view
        gamma: ``ChannelAssignment`` or boolean ``(U, B, K)`` array
        p_uk: ``(U, K)`` per-user-band powers in mW
    """
    if view.is_empty:
        return 0.0
    mask = gamma.gamma if isinstance(gamma, ChannelAssignment) else np.asarray(gamma, dtype=bool)
    rates = view.band_widths[None, None, :] * np.log2(1.0 + per_user_band_sinr(view, p_uk))
    return float(np.sum(rates, where=mask))


def continuous_sum_rate(view: CellView, p: np.ndarray) -> float:
    """Objective of the continuous problem: ``Σ W_k log2(1 + SINR_{u,b,k}(p))`` over all links."""
    if view.is_empty:
        return 0.0
    return float(np.sum(view.band_widths[None, None, :] * np.log2(1.0 + sinr(view, p))))


def assignment_from_power(p: np.ndarray) -> ChannelAssignment:
    """Concentrated discrete reading of per-link powers.

    Every (user, band) with positive power is assigned to the BS receiving the
    largest share of it (lowest index on ties).
    """
    p = np.asarray(p, dtype=float)
    gamma = np.zeros(p.shape, dtype=bool)
    if p.size == 0:
        return ChannelAssignment(gamma)
    best = p.argmax(axis=1)
    active = p.sum(axis=1) > 0
    users, bands = np.nonzero(active)
    gamma[users, best[users, bands], bands] = True
    return ChannelAssignment(gamma)


@dataclass(frozen=True)
class CellSolution:
    """Discrete solution of one cell in local indices."""

    assignment: ChannelAssignment
    p_uk: np.ndarray
    converged: bool = True
    iterations: int = 0


def system_sum_rate(
    partition: VirtualCellPartition,
    chan: ChannelRealization,
    band_widths: np.ndarray,
    solutions: Sequence[CellSolution],
    mode: EvalMode = EvalMode.GLOBAL,
) -> float:
    """Network sum rate of per-cell solutions.

    In ``GLOBAL`` mode every served link sees interference from all users of
    the network; in ``LOCAL`` mode only from users of its own cell.
    """
    if len(solutions) != len(partition.cells):
        raise ValueError(f"{len(solutions)} solutions for {len(partition.cells)} cells")

    band_widths = np.asarray(band_widths, dtype=float)
    p_global = np.zeros((chan.num_users, chan.num_bands))
    for cell, solution in zip(partition.cells, solutions):
        if cell.users:
            p_global[list(cell.users), :] = solution.p_uk

    rate = 0.0
    for cell, solution in zip(partition.cells, solutions):
        if not cell.users:
            continue
        users = np.asarray(cell.users)
        bss = np.asarray(cell.bs)
        gain = chan.gain[np.ix_(users, bss, np.arange(chan.num_bands))]
        p_uk = p_global[users, :]
        if mode == EvalMode.GLOBAL:
            # Every user of the network except the link's own
            others = np.ones((users.size, chan.num_users))
            others[np.arange(users.size), users] = 0.0
            interference = np.einsum("uv,vbk,vk->ubk", others, chan.gain[:, bss, :], p_global)
        else:
            interference = other_user_power(gain, p_uk)
        signal = gain * p_uk[:, None, :]
        link_sinr = signal / (chan.noise[bss, :][None, :, :] + interference)
        rates = band_widths[None, None, :] * np.log2(1.0 + link_sinr)
        rate += float(np.sum(rates, where=solution.assignment.gamma))
    return rate
