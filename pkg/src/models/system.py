"""System-level data models: configuration, deployment and channel tensors."""

import math
from dataclasses import dataclass
from typing import List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator


class SystemConfig(BaseModel):
    """Network geometry, radio constants and budgets.

    Units are part of the field names' contract: ``band_width`` in Hz,
    ``noise_psd`` in dBm/Hz, budgets in dBm, distances in meters, path-loss
    and shadowing parameters in dB.
    """

    model_config = ConfigDict(extra="forbid")

    num_bs: int = Field(default=10, ge=1)
    num_users: int = Field(default=80, ge=1)
    side_length: float = Field(default=1000.0, gt=0)
    num_bands: int = Field(default=8, ge=1)
    band_width: float = Field(default=20_000.0, gt=0)
    noise_psd: float = -174.0
    user_budget: float = 23.0
    user_budgets: Optional[List[float]] = None
    pathloss_a: float = 35.0
    pathloss_b: float = 34.0
    shadowing_sigma: float = Field(default=8.0, ge=0)
    min_distance: float = Field(default=1.0, gt=0)
    rayleigh_fading: bool = True

    @model_validator(mode="after")
    def check_user_budgets(self) -> "SystemConfig":
        if self.user_budgets is not None and len(self.user_budgets) != self.num_users:
            raise ValueError(
                f"user_budgets has {len(self.user_budgets)} entries, expected {self.num_users}"
            )
        for name in ("noise_psd", "user_budget", "pathloss_a", "pathloss_b"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        return self

    def budgets_dbm(self) -> np.ndarray:
        """Per-user power budgets in dBm."""
        if self.user_budgets is not None:
            return np.asarray(self.user_budgets, dtype=float)
        return np.full(self.num_users, self.user_budget, dtype=float)

    def budgets_mw(self) -> np.ndarray:
        """Per-user power budgets P̄_u in mW."""
        return np.power(10.0, self.budgets_dbm() / 10.0)

    def band_widths(self) -> np.ndarray:
        """Bandwidth W_k of every band in Hz."""
        return np.full(self.num_bands, self.band_width, dtype=float)

    @property
    def noise_power_dbm(self) -> float:
        """Noise power over one band in dBm."""
        return self.noise_psd + 10.0 * math.log10(self.band_width)


@dataclass(frozen=True)
class Deployment:
    """Planar positions (meters) of base-stations and users."""

    bs_positions: np.ndarray
    user_positions: np.ndarray

    @property
    def num_bs(self) -> int:
        return self.bs_positions.shape[0]

    @property
    def num_users(self) -> int:
        return self.user_positions.shape[0]

    def within(self, side_length: float) -> bool:
        """Check that every coordinate lies in ``[0, side_length]``."""
        points = np.vstack([self.bs_positions, self.user_positions])
        return bool(np.all(points >= 0.0) and np.all(points <= side_length))


@dataclass(frozen=True)
class ChannelRealization:
    """Linear channel power gains ``gain[u, b, k]`` and noise ``noise[b, k]`` (mW)."""

    gain: np.ndarray
    noise: np.ndarray

    @property
    def num_users(self) -> int:
        return self.gain.shape[0]

    @property
    def num_bs(self) -> int:
        return self.gain.shape[1]

    @property
    def num_bands(self) -> int:
        return self.gain.shape[2]
