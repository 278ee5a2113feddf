"""Per-cell view of the network."""

from dataclasses import dataclass

import numpy as np

from src.core.cells.partition import VirtualCell
from src.models.system import ChannelRealization


@dataclass(frozen=True)
class CellView:
    """Channel data restricted to one virtual cell.

    Local user ``i`` is global user ``users[i]``; local BS ``j`` is global BS
    ``bss[j]``. All bands are kept.

    Attributes:
        users: Global user indices, ascending
        bss: Global BS indices, ascending
        gain: ``(U_v, B_v, K)`` linear gains
        noise: ``(B_v, K)`` noise powers in mW
        band_widths: ``(K,)`` bandwidths in Hz
        budgets: ``(U_v,)`` power budgets in mW
    """

    users: np.ndarray
    bss: np.ndarray
    gain: np.ndarray
    noise: np.ndarray
    band_widths: np.ndarray
    budgets: np.ndarray

    @classmethod
    def from_cell(
        cls,
        cell: VirtualCell,
        chan: ChannelRealization,
        band_widths: np.ndarray,
        budgets: np.ndarray,
    ) -> "CellView":
        users = np.asarray(cell.users, dtype=int)
        bss = np.asarray(cell.bs, dtype=int)
        return cls(
            users=users,
            bss=bss,
            gain=chan.gain[np.ix_(users, bss, np.arange(chan.num_bands))],
            noise=chan.noise[bss, :],
            band_widths=np.asarray(band_widths, dtype=float),
            budgets=np.asarray(budgets, dtype=float)[users],
        )

    @classmethod
    def from_arrays(
        cls,
        gain: np.ndarray,
        noise: np.ndarray,
        band_widths,
        budgets,
    ) -> "CellView":
        """Build a standalone view whose local indices are also global."""
        gain = np.asarray(gain, dtype=float)
        num_users, num_bs, _ = gain.shape
        return cls(
            users=np.arange(num_users),
            bss=np.arange(num_bs),
            gain=gain,
            noise=np.asarray(noise, dtype=float),
            band_widths=np.asarray(band_widths, dtype=float),
            budgets=np.asarray(budgets, dtype=float),
        )

    @property
    def shape(self):
        return self.gain.shape

    @property
    def num_users(self) -> int:
        return self.gain.shape[0]

    @property
    def num_bs(self) -> int:
        return self.gain.shape[1]

    @property
    def num_bands(self) -> int:
        return self.gain.shape[2]

    @property
    def is_empty(self) -> bool:
        return self.num_users == 0
