"""Decision variables and solver settings of the per-cell allocation problem."""

from dataclasses import dataclass

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

BUDGET_SLACK = 1e-9


@dataclass(frozen=True)
class PowerMatrix:
    """Transmit powers ``p[u, b, k]`` in mW.

    ``p[u, b, k]`` is the power user ``u`` spends on band ``k`` towards BS ``b``.
    """

    p: np.ndarray

    @property
    def per_user_band(self) -> np.ndarray:
        """Aggregate powers P_{u,k} = Σ_b p[u, b, k]."""
        return self.p.sum(axis=1)

    @property
    def per_user(self) -> np.ndarray:
        """Total power spent by every user."""
        return self.p.sum(axis=(1, 2))

    def is_feasible(self, budgets: np.ndarray, slack: float = BUDGET_SLACK) -> bool:
        """Check nonnegativity and per-user budgets with relative slack."""
        if np.any(self.p < 0) or not np.all(np.isfinite(self.p)):
            return False
        return bool(np.all(self.per_user <= budgets * (1.0 + slack)))

    @classmethod
    def zeros(cls, num_users: int, num_bs: int, num_bands: int) -> "PowerMatrix":
        return cls(np.zeros((num_users, num_bs, num_bands)))


@dataclass(frozen=True)
class ChannelAssignment:
    """Binary link indicators ``gamma[u, b, k]``."""

    gamma: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "gamma", np.asarray(self.gamma, dtype=bool))

    def is_feasible(self) -> bool:
        """Every user uses at most one BS per band."""
        return bool(np.all(self.gamma.sum(axis=1) <= 1))

    def serving_bs(self) -> np.ndarray:
        """``(U, K)`` index of the serving BS, -1 where the user is silent."""
        served = self.gamma.any(axis=1)
        return np.where(served, self.gamma.argmax(axis=1), -1)

    @classmethod
    def empty(cls, num_users: int, num_bs: int, num_bands: int) -> "ChannelAssignment":
        return cls(np.zeros((num_users, num_bs, num_bands), dtype=bool))


class SolverSettings(BaseModel):
    """Iteration limits and tolerances of the power fixed-point solver."""

    model_config = ConfigDict(extra="forbid")

    outer_max: int = Field(default=30, ge=1)
    inner_max: int = Field(default=200, ge=1)
    fp_tol: float = Field(default=1e-6, gt=0)
    power_floor: float = Field(default=1e-12, gt=0)
    lambda_tol: float = Field(default=1e-9, gt=0)
    freeze_after: int = Field(default=3, ge=1)
    # Sweeps without a new smallest change before an inner loop gives up
    stall_sweeps: int = Field(default=20, ge=1)
    # Cap on fixed-point sweeps per solver call, over all outer iterations
    sweep_budget: int = Field(default=3000, ge=1)
    refine: bool = True
    refine_rounds: int = Field(default=20, ge=1)
    debug_checks: bool = False


class AlternatingSettings(BaseModel):
    """Stopping rule of the alternating channel/power loop."""

    model_config = ConfigDict(extra="forbid")

    delta: float = Field(default=10.0, gt=0)
    n_max: int = Field(default=20, ge=1)
