"""High-SINR surrogate of the link rate.

``log(1 + z)`` is lower-bounded by ``alpha * log(z) + beta`` with the bound
tight at the fitting point ``z0``.
"""

from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np

ArrayLike = Union[float, np.ndarray]


def alpha_beta(z0: ArrayLike) -> Tuple[ArrayLike, ArrayLike]:
    """Surrogate coefficients fitted at SINR ``z0`` (natural-log form).

    Args:
        z0: Fitting SINR, scalar or array, ``>= 0``

    Returns:
        ``(alpha, beta)`` with ``alpha = z0 / (1 + z0)`` and
        ``beta = log(1 + z0) - alpha * log(z0)``; ``beta = 0`` where ``z0 = 0``.
    """
    z = np.maximum(np.asarray(z0, dtype=float), 0.0)
    alpha = z / (1.0 + z)
    with np.errstate(divide="ignore", invalid="ignore"):
        beta = np.where(z > 0, np.log1p(z) - alpha * np.log(z), 0.0)
    if np.ndim(z0) == 0:
        return float(alpha), float(beta)
    return alpha, beta


def surrogate_gap(alpha: ArrayLike, beta: ArrayLike, z: ArrayLike) -> np.ndarray:
    """``log(1 + z) - (alpha log z + beta)``; nonnegative wherever the bound holds."""
    z = np.asarray(z, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        bound = np.where(z > 0, np.asarray(alpha) * np.log(np.where(z > 0, z, 1.0)) + beta, -np.inf)
    return np.log1p(z) - bound


@dataclass(frozen=True)
class SurrogateCoefficients:
    """Per-link surrogate coefficients.

    ``alpha`` drives the power update; ``beta`` only enters the surrogate
    objective value and is carried for reporting.
    """

    alpha: np.ndarray
    beta: np.ndarray

    @classmethod
    def uniform(cls, shape) -> "SurrogateCoefficients":
        """``alpha = 1`` on every link, the cold start."""
        return cls(np.ones(shape), np.zeros(shape))

    @classmethod
    def from_assignment(cls, gamma: np.ndarray) -> "SurrogateCoefficients":
        """``alpha`` equal to a binary channel assignment."""
        gamma = np.asarray(gamma, dtype=float)
        return cls(gamma.copy(), np.zeros_like(gamma))

    @classmethod
    def at(cls, z0: np.ndarray, active: np.ndarray = None) -> "SurrogateCoefficients":
        """Refit at SINRs ``z0``; links outside ``active`` get zero coefficients."""
        alpha, beta = alpha_beta(np.asarray(z0, dtype=float))
        if active is not None:
            alpha = np.where(active, alpha, 0.0)
            beta = np.where(active, beta, 0.0)
        return cls(alpha, beta)

    @property
    def active(self) -> np.ndarray:
        return self.alpha > 0

    def max_violation(self, z: np.ndarray) -> float:
        """Largest amount by which the lower bound exceeds ``log(1 + z)`` on active links."""
        mask = self.active & (np.asarray(z) > 0)
        if not np.any(mask):
            return 0.0
        gap = surrogate_gap(self.alpha[mask], self.beta[mask], np.asarray(z)[mask])
        return float(max(0.0, -gap.min()))


@dataclass(frozen=True)
class DualVariables:
    """Per-user budget multipliers."""

    lambdas: np.ndarray

    @property
    def max(self) -> float:
        return float(self.lambdas.max()) if self.lambdas.size else 0.0

    def slackness(self, p: np.ndarray, budgets: np.ndarray) -> np.ndarray:
        """``|lambda_u (budget_u - Σ p)|`` per user."""
        return np.abs(self.lambdas * (budgets - p.sum(axis=(1, 2))))
