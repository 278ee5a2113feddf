"""Channel allocation rules for a fixed power allocation.

Each rule takes per-user-band powers ``P[u, k]`` and returns a binary
assignment in which every user uses at most one BS per band.
"""

from typing import Callable, Dict, Tuple

import numpy as np
from scipy.optimize import linear_sum_assignment

from src.core.rates.sinr import per_user_band_sinr
from src.core.rates.view import CellView
from src.models.allocation import ChannelAssignment
from src.models.experiment import Scheme

AllocationRule = Callable[[CellView, np.ndarray], ChannelAssignment]


def uc_allocation(view: CellView, p_uk: np.ndarray) -> ChannelAssignment:
    """User-centric rule: every user picks its best BS on every band.

    Several users may land on the same BS and band.
    """
    z = per_user_band_sinr(view, p_uk)
    gamma = np.zeros(view.shape, dtype=bool)
    if view.is_empty:
        return ChannelAssignment(gamma)
    best = z.argmax(axis=1)
    users, bands = np.indices((view.num_users, view.num_bands))
    gamma[users, best, bands] = True
    return ChannelAssignment(gamma)


def bsc_selections(view: CellView, p_uk: np.ndarray) -> np.ndarray:
    """``(B, K)`` user chosen by every BS on every band (lowest index on ties)."""
    z = per_user_band_sinr(view, p_uk)
    return z.argmax(axis=0)


def bsc_allocation(view: CellView, p_uk: np.ndarray) -> ChannelAssignment:
    """BS-centric rule: every BS picks its best user on every band.

    When several BSs pick the same user on a band, the user keeps only the
    one where its SINR is highest.
    """
    gamma = np.zeros(view.shape, dtype=bool)
    if view.is_empty:
        return ChannelAssignment(gamma)

    z = per_user_band_sinr(view, p_uk)
    picks = z.argmax(axis=0)
    selected = np.zeros(view.shape, dtype=bool)
    bss, bands = np.indices((view.num_bs, view.num_bands))
    selected[picks, bss, bands] = True

    keep = np.where(selected, z, -np.inf).argmax(axis=1)
    users, bands = np.nonzero(selected.any(axis=1))
    gamma[users, keep[users, bands], bands] = True
    return ChannelAssignment(gamma)


def max_weight_matching(weights: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Maximum-weight bipartite matching of rows to columns.

    Args:
        weights: ``(rows, cols)`` nonnegative weights

    Returns:
        Matched ``(row_indices, col_indices)``; ``min(rows, cols)`` pairs
    """
    weights = np.asarray(weights, dtype=float)
    if weights.size == 0:
        empty = np.zeros(0, dtype=int)
        return empty, empty
    return linear_sum_assignment(weights, maximize=True)


def msrm_allocation(view: CellView, p_uk: np.ndarray) -> ChannelAssignment:
    """Maximum sum-rate matching: per band, a one-to-one user/BS matching
    maximising ``Σ W_k log2(1 + SINR)``."""
    gamma = np.zeros(view.shape, dtype=bool)
    if view.is_empty:
        return ChannelAssignment(gamma)

    z = per_user_band_sinr(view, p_uk)
    for k in range(view.num_bands):
        weights = view.band_widths[k] * np.log2(1.0 + z[:, :, k])
        rows, cols = max_weight_matching(weights)
        gamma[rows, cols, k] = True
    return ChannelAssignment(gamma)


ALLOCATION_RULES: Dict[Scheme, AllocationRule] = {
    Scheme.UC: uc_allocation,
    Scheme.BSC: bsc_allocation,
    Scheme.MSRM: msrm_allocation,
}


def get_allocation_rule(scheme: Scheme) -> AllocationRule:
    """Look up the channel rule of a discrete scheme."""
    try:
        return ALLOCATION_RULES[Scheme(scheme)]
    except KeyError:
        raise ValueError(f"Scheme {scheme} has no channel allocation rule")
