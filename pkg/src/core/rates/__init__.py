"""SINR and rate computations."""

from src.core.rates.view import CellView
from src.core.rates.sinr import (
    CellSolution,
    assignment_from_power,
    cell_sum_rate,
    continuous_sum_rate,
    intra_cell_interference,
    link_interference,
    other_user_power,
    per_user_band_sinr,
    sinr,
    system_sum_rate,
)

__all__ = [
    "CellView",
    "CellSolution",
    "assignment_from_power",
    "cell_sum_rate",
    "continuous_sum_rate",
    "intra_cell_interference",
    "link_interference",
    "other_user_power",
    "per_user_band_sinr",
    "sinr",
    "system_sum_rate",
]
