"""Alternating channel/power optimisation of one virtual cell."""

from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
from loguru import logger

from src.core.channel.allocation import AllocationRule
from src.core.power.solver import PowerSolution, solve_power_continuous
from src.core.rates.sinr import cell_sum_rate
from src.core.rates.view import CellView
from src.models.allocation import AlternatingSettings, ChannelAssignment, SolverSettings


@dataclass(frozen=True)
class AlternatingResult:
    """Best iterate of the alternating loop.

    Attributes:
        assignment: Channel assignment of the best round
        p_uk: ``(U, K)`` per-user-band powers of the best round
        rate: Cell sum rate of the best round in bits/s
        iterations: Rounds executed
        converged: Whether the rate gain fell to ``delta`` before ``n_max``
        deltas: Rate change of every round (first round relative to zero)
        rates: Rate of every round
        power_solutions: Power-step results, one per round
    """

    assignment: ChannelAssignment
    p_uk: np.ndarray
    rate: float
    iterations: int
    converged: bool
    deltas: List[float] = field(default_factory=list)
    rates: List[float] = field(default_factory=list)
    power_solutions: List[PowerSolution] = field(default_factory=list)


def alternating_solve(
    view: CellView,
    rule: AllocationRule,
    settings: Optional[AlternatingSettings] = None,
    solver: Optional[SolverSettings] = None,
) -> AlternatingResult:
    """Alternate a channel rule with the power solver.

    Starts from an even split of every budget over the bands. Each round
    assigns channels for the current powers, re-solves the powers starting
    from that assignment, and stops once the rate gain is at most
    ``settings.delta`` or after ``settings.n_max`` rounds.

    Args:
        view: Cell view
        rule: ``uc_allocation``, ``bsc_allocation`` or ``msrm_allocation``
        settings: Stopping rule
        solver: Power solver settings

    Returns:
        The round with the highest cell sum rate
    """
    settings = settings or AlternatingSettings()
    solver = solver or SolverSettings()

    if view.is_empty:
        return AlternatingResult(
            assignment=ChannelAssignment.empty(*view.shape),
            p_uk=np.zeros((0, view.num_bands)),
            rate=0.0,
            iterations=0,
            converged=True,
        )

    name = getattr(rule, "__name__", "channel rule")
    p_uk = np.repeat(view.budgets[:, None] / view.num_bands, view.num_bands, axis=1)
    previous = 0.0
    best: Optional[tuple] = None
    deltas: List[float] = []
    rates: List[float] = []
    solutions: List[PowerSolution] = []
    converged = False
    n = 0

    for n in range(1, settings.n_max + 1):
        gamma = rule(view, p_uk)
        solution = solve_power_continuous(view, solver, init_assignment=gamma, init_power=p_uk)
        p_uk = solution.power.per_user_band
        rate = cell_sum_rate(view, gamma, p_uk)
        delta = rate - previous
        previous = rate

        rates.append(rate)
        deltas.append(delta)
        solutions.append(solution)
        if best is None or rate > best[2]:
            best = (gamma, p_uk, rate)
        logger.debug(f"{name} round {n}: rate={rate:.6g} bps, delta={delta:.6g}")

        if delta <= settings.delta:
            converged = True
            break

    gamma, p_best, rate = best
    return AlternatingResult(
        assignment=gamma,
        p_uk=p_best,
        rate=rate,
        iterations=n,
        converged=converged,
        deltas=deltas,
        rates=rates,
        power_solutions=solutions,
    )
