"""Rate-driven refinement of per-user band powers.

Works on ``P[u, k]`` with every (user, band) served by its best allowed BS,
which is the discrete sum rate the schemes are scored by. Users are visited
in turn and each takes the best of a few moves on its own band powers:
silence, the whole budget on one band, an even split, one band switched off
or halved. A move is kept only when it raises the cell sum rate.
"""

from dataclasses import dataclass
from typing import List, Sequence

import numpy as np
from loguru import logger

from src.core.rates.view import CellView

IMPROVE_TOL = 1e-9


@dataclass(frozen=True)
class RefinedPowers:
    """Outcome of ``refine_band_powers``.

    Attributes:
        p_uk: ``(U, K)`` per-user-band powers in mW
        power: ``(U, B, K)`` link powers, each (user, band) concentrated on
            its serving BS
        rate: Cell sum rate in bits/s
        rounds: Passes over the users, summed over all starts
    """

    p_uk: np.ndarray
    power: np.ndarray
    rate: float
    rounds: int


def _batch_link_rates(view: CellView, p_batch: np.ndarray) -> np.ndarray:
    """``(C, U, B, K)`` link rates for a batch of per-user-band powers ``(C, U, K)``."""
    signal = view.gain[None] * p_batch[:, :, None, :]
    # Ranking only; callers rescore the winner with cell_sum_rate
    total = signal.sum(axis=1, keepdims=True)
    z = signal / (view.noise[None, None, :, :] + np.maximum(total - signal, 0.0))
    return view.band_widths * np.log2(1.0 + z)


def _served_rates(view: CellView, p_batch: np.ndarray, allowed: np.ndarray) -> np.ndarray:
    rates = np.where(allowed[None], _batch_link_rates(view, p_batch), 0.0)
    return rates.max(axis=2).sum(axis=(1, 2))


def served_rate(view: CellView, p_uk: np.ndarray, allowed: np.ndarray) -> float:
    """Cell sum rate with every (user, band) at its best allowed BS.

    Args:
        view: Cell view
        p_uk: ``(U, K)`` per-user-band powers in mW
        allowed: ``(U, B, K)`` links that may serve
    """
    if view.is_empty:
        return 0.0
    p_batch = np.asarray(p_uk, dtype=float)[None]
    return float(_served_rates(view, p_batch, np.asarray(allowed, dtype=bool))[0])


def _user_moves(x: np.ndarray, budget: float, usable: np.ndarray) -> np.ndarray:
    """Candidate band-power vectors for one user, the current one first."""
    num_bands = x.size
    moves: List[np.ndarray] = [x, np.zeros(num_bands)]
    total = float(x.sum())
    if total > 0:
        moves.append(x * (budget / total))

    bands = np.flatnonzero(usable)
    if bands.size:
        even = np.zeros(num_bands)
        even[bands] = budget / bands.size
        moves.append(even)
    for k in bands:
        single = np.zeros(num_bands)
        single[k] = budget
        moves.append(single)

    for k in np.flatnonzero(x > 0):
        rest = total - x[k]
        if rest > 0:
            off = x.copy()
            off[k] = 0.0
            moves.append(off * (total / rest))
        half = x.copy()
        half[k] *= 0.5
        moves.append(half)
    return np.vstack(moves)


def _coordinate_search(
    view: CellView,
    p_uk: np.ndarray,
    allowed: np.ndarray,
    max_rounds: int,
):
    usable = allowed.any(axis=1)
    p = np.where(usable, p_uk, 0.0)
    rate = served_rate(view, p, allowed)
    rounds = 0
    for rounds in range(1, max_rounds + 1):
        improved = False
        for u in range(view.num_users):
            moves = _user_moves(p[u], float(view.budgets[u]), usable[u])
            batch = np.repeat(p[None], moves.shape[0], axis=0)
            batch[:, u, :] = moves
            scores = _served_rates(view, batch, allowed)
            best = int(np.argmax(scores))
            if scores[best] > rate + IMPROVE_TOL * max(rate, 1.0):
                p, rate = batch[best], float(scores[best])
                improved = True
        if not improved:
            break
    return p, rate, rounds


def orthogonal_start(view: CellView, allowed: np.ndarray) -> np.ndarray:
    """One user per band, strongest unused user first.

    Bands are handed out in order; once every user holds a band the next band
    goes to the strongest user again. Each user splits its budget evenly over
    the bands it holds.
    """
    allowed = np.asarray(allowed, dtype=bool)
    num_users, _, num_bands = view.shape
    quality = np.where(allowed, view.gain / view.noise[None, :, :], 0.0).max(axis=1)
    holdings: List[List[int]] = [[] for _ in range(num_users)]
    used = np.zeros(num_users, dtype=bool)

    for k in range(num_bands):
        candidates = np.where(used | (quality[:, k] <= 0), -np.inf, quality[:, k])
        if np.all(np.isneginf(candidates)):
            used[:] = False
            candidates = np.where(quality[:, k] > 0, quality[:, k], -np.inf)
            if np.all(np.isneginf(candidates)):
                continue
        u = int(np.argmax(candidates))
        used[u] = True
        holdings[u].append(k)

    p_uk = np.zeros((num_users, num_bands))
    for u, bands in enumerate(holdings):
        if bands:
            p_uk[u, bands] = view.budgets[u] / len(bands)
    return p_uk


def concentrate(view: CellView, p_uk: np.ndarray, allowed: np.ndarray) -> np.ndarray:
    """Link powers with each (user, band) on its best allowed BS (lowest index on ties)."""
    p_uk = np.asarray(p_uk, dtype=float)
    rates = _batch_link_rates(view, p_uk[None])[0]
    serving = np.where(allowed, rates, -np.inf).argmax(axis=1)
    power = np.zeros(view.shape)
    users, bands = np.nonzero((p_uk > 0) & allowed.any(axis=1))
    power[users, serving[users, bands], bands] = p_uk[users, bands]
    return power


def refine_band_powers(
    view: CellView,
    starts: Sequence[np.ndarray],
    allowed: np.ndarray,
    max_rounds: int = 20,
) -> RefinedPowers:
    """Improve per-user band powers by single-user moves.

    Args:
        view: Cell view
        starts: ``(U, K)`` starting powers; the orthogonal start is always added
        allowed: ``(U, B, K)`` links that may serve
        max_rounds: Passes over the users per start

    Returns:
        The best result over all starts (the earliest on ties)
    """
    allowed = np.asarray(allowed, dtype=bool)
    if view.is_empty:
        return RefinedPowers(np.zeros((0, view.num_bands)), np.zeros(view.shape), 0.0, 0)

    best = None
    total_rounds = 0
    for start in [*starts, orthogonal_start(view, allowed)]:
        p, rate, rounds = _coordinate_search(view, np.asarray(start, dtype=float), allowed, max_rounds)
        total_rounds += rounds
        if best is None or rate > best[1]:
            best = (p, rate)

    p_uk, rate = best
    logger.debug(f"refined band powers: rate={rate:.6g} bps after {total_rounds} rounds")
    return RefinedPowers(
        p_uk=p_uk,
        power=concentrate(view, p_uk, allowed),
        rate=rate,
        rounds=total_rounds,
    )
