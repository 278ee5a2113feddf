"""Continuous power allocation."""

from src.core.power.surrogate import (
    DualVariables,
    SurrogateCoefficients,
    alpha_beta,
    surrogate_gap,
)
from src.core.power.refine import (
    RefinedPowers,
    orthogonal_start,
    refine_band_powers,
    served_rate,
)
from src.core.power.solver import (
    ConcentrationReport,
    KKTResiduals,
    OuterIterate,
    PowerSolution,
    concentration_report,
    fixed_point_sweep,
    kkt_residuals,
    solve_lambda,
    solve_lambdas,
    solve_power_continuous,
)

__all__ = [
    "DualVariables",
    "SurrogateCoefficients",
    "alpha_beta",
    "surrogate_gap",
    "RefinedPowers",
    "orthogonal_start",
    "refine_band_powers",
    "served_rate",
    "ConcentrationReport",
    "KKTResiduals",
    "OuterIterate",
    "PowerSolution",
    "concentration_report",
    "fixed_point_sweep",
    "kkt_residuals",
    "solve_lambda",
    "solve_lambdas",
    "solve_power_continuous",
]
