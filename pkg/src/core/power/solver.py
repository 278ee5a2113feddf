"""Fixed-point power allocation for one virtual cell.

The continuous problem lets every user split its power over all
(BS, band) links of its cell. It is attacked by successive surrogate
refits: each outer iteration fixes ``alpha`` from the current SINRs and runs
fixed-point sweeps of the stationarity condition of the surrogate problem,
with per-user multipliers keeping every budget. The best iterate is then
refined by single-user on/off moves scored on the true discrete sum rate.
"""

import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
from loguru import logger

from src.core.power.refine import refine_band_powers
from src.core.power.surrogate import DualVariables, SurrogateCoefficients
from src.core.rates.sinr import (
    assignment_from_power,
    cell_sum_rate,
    continuous_sum_rate,
    link_interference,
    sinr,
)
from src.core.rates.view import CellView
from src.models.allocation import ChannelAssignment, PowerMatrix, SolverSettings
from src.utils.exceptions import PowerSolverError

LN2 = math.log(2.0)
BISECTION_MAX_ITER = 200
BRACKET_MAX_DOUBLINGS = 2048
SURROGATE_CHECK_TOL = 1e-9


# ---------------------------------------------------------------------------
# Budget multipliers
# ---------------------------------------------------------------------------

def _budget_use(lambdas: np.ndarray, numerators: np.ndarray, denominators: np.ndarray) -> np.ndarray:
    """Row sums of ``n / (lambda ln2 + d)`` over positive numerators."""
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = numerators / (lambdas[:, None] * LN2 + denominators)
    return np.where(numerators > 0, terms, 0.0).sum(axis=1)


def solve_lambdas(
    budgets: np.ndarray,
    numerators: np.ndarray,
    denominators: np.ndarray,
    tol: float = 1e-9,
) -> np.ndarray:
    """Vectorised multiplier search, one row per user.

    Args:
        budgets: ``(U,)`` positive budgets
        numerators: ``(U, M)`` nonnegative numerators
        denominators: ``(U, M)`` nonnegative denominators
        tol: Relative budget residual at which bisection stops

    Returns:
        ``(U,)`` multipliers; zero where the unconstrained update fits the
        budget, otherwise the upper end of the final bisection bracket, whose
        power use never exceeds the budget.
    """
    budgets = np.asarray(budgets, dtype=float)
    numerators = np.asarray(numerators, dtype=float)
    denominators = np.asarray(denominators, dtype=float)
    lambdas = np.zeros(budgets.shape)

    binding = _budget_use(lambdas, numerators, denominators) > budgets
    if not np.any(binding):
        return lambdas

    n = numerators[binding]
    d = denominators[binding]
    b = budgets[binding]
    lo = np.zeros(b.shape)
    hi = np.ones(b.shape)

    # Grow the bracket until its upper end is feasible
    for _ in range(BRACKET_MAX_DOUBLINGS):
        over = _budget_use(hi, n, d) > b
        if not np.any(over):
            break
        lo = np.where(over, hi, lo)
        hi = np.where(over, hi * 2.0, hi)

    for _ in range(BISECTION_MAX_ITER):
        use_hi = _budget_use(hi, n, d)
        done = ((b - use_hi) <= tol * b) | (hi - lo <= np.finfo(float).eps * hi)
        if np.all(done):
            break
        mid = 0.5 * (lo + hi)
        over = _budget_use(mid, n, d) > b
        lo = np.where(done | ~over, lo, mid)
        hi = np.where(~done & ~over, mid, hi)

    lambdas[binding] = hi
    return lambdas


def solve_lambda(budget: float, denominators, numerators, tol: float = 1e-9) -> float:
    """Multiplier ``lambda >= 0`` with ``Σ n / (lambda ln2 + d) = budget``.

    Returns 0 when the sum at ``lambda = 0`` already fits the budget.
    """
    n = np.asarray(numerators, dtype=float).reshape(1, -1)
    d = np.asarray(denominators, dtype=float).reshape(1, -1)
    return float(solve_lambdas(np.array([float(budget)]), n, d, tol)[0])


# ---------------------------------------------------------------------------
# Fixed-point update
# ---------------------------------------------------------------------------

def _pricing_terms(view: CellView, p: np.ndarray, alpha: np.ndarray) -> np.ndarray:
    """``D[u, b, k]``: marginal interference price of link (u, b, k).

    Every other link (v, c) on band k is weighted by ``W_k alpha / (noise +
    interference)`` and charged the gain from user u to its BS c; u's power
    on a band reaches every BS of the cell.
    """
    num_users, num_bs, _ = view.shape
    interference = link_interference(view.gain, p)
    weights = view.band_widths[None, None, :] * alpha / (view.noise[None, :, :] + interference)
    other_users = np.einsum("uv,vck->uck", 1.0 - np.eye(num_users), weights)
    from_others = np.einsum("uck,uck->uk", view.gain, other_users)
    own_elsewhere = np.einsum("cb,uck->ubk", 1.0 - np.eye(num_bs), view.gain * weights)
    return from_others[:, None, :] + own_elsewhere


def fixed_point_sweep(
    view: CellView,
    p: PowerMatrix,
    alpha: SurrogateCoefficients,
    budgets: np.ndarray,
    lambda_tol: float = 1e-9,
) -> Tuple[PowerMatrix, DualVariables]:
    """One update of all link powers.

    Args:
        view: Cell view
        p: Current powers
        alpha: Surrogate coefficients; links with ``alpha = 0`` get zero power
        budgets: ``(U,)`` budgets in mW
        lambda_tol: Relative budget residual for the multiplier search

    Returns:
        New powers and the multipliers used

    Raises:
        PowerSolverError: A non-finite value appeared in the update
    """
    current = np.asarray(p.p, dtype=float)
    coeff = np.asarray(alpha.alpha, dtype=float)
    num_users = view.num_users

    price = _pricing_terms(view, current, coeff)
    numerators = view.band_widths[None, None, :] * coeff
    if not (np.all(np.isfinite(price)) and np.all(np.isfinite(numerators))):
        raise PowerSolverError("non-finite interference price", shape=list(view.shape))

    lambdas = solve_lambdas(
        budgets,
        numerators.reshape(num_users, -1),
        price.reshape(num_users, -1),
        lambda_tol,
    )
    with np.errstate(divide="ignore", invalid="ignore"):
        updated = numerators / (lambdas[:, None, None] * LN2 + price)
    updated = np.where(numerators > 0, updated, 0.0)

    if not np.all(np.isfinite(updated)):
        raise PowerSolverError(
            "non-finite power update; check power_floor",
            max_lambda=float(lambdas.max()) if lambdas.size else 0.0,
        )
    return PowerMatrix(updated), DualVariables(lambdas)


def _fit_budget(p: np.ndarray, budgets: np.ndarray) -> np.ndarray:
    """Scale down users whose total exceeds the budget."""
    totals = p.sum(axis=(1, 2))
    with np.errstate(divide="ignore", invalid="ignore"):
        scale = np.where(totals > budgets, budgets / totals, 1.0)
    return p * scale[:, None, None]


# ---------------------------------------------------------------------------
# Diagnostics
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class KKTResiduals:
    """Optimality residuals of a power allocation for fixed ``alpha``.

    Attributes:
        stationarity: Largest relative gap between ``p`` and its own update
        slackness: Largest ``|lambda_u (budget_u - Σ p)| / budget_u``
    """

    stationarity: float
    slackness: float


def kkt_residuals(
    view: CellView,
    p: PowerMatrix,
    alpha: SurrogateCoefficients,
    duals: DualVariables,
    budgets: np.ndarray,
) -> KKTResiduals:
    current = np.asarray(p.p, dtype=float)
    budgets = np.asarray(budgets, dtype=float)
    if current.size == 0:
        return KKTResiduals(0.0, 0.0)

    price = _pricing_terms(view, current, alpha.alpha)
    numerators = view.band_widths[None, None, :] * alpha.alpha
    with np.errstate(divide="ignore", invalid="ignore"):
        target = numerators / (duals.lambdas[:, None, None] * LN2 + price)
    target = np.where(numerators > 0, target, 0.0)
    scale = max(float(current.max()), np.finfo(float).tiny)
    stationarity = float(np.max(np.abs(target - current)) / scale)
    slackness = float(np.max(duals.slackness(current, budgets) / budgets))
    return KKTResiduals(stationarity=stationarity, slackness=slackness)


@dataclass(frozen=True)
class ConcentrationReport:
    """Share of each (user, band)'s power that lands on its dominant BS.

    ``shares`` is ``NaN`` where the user is silent on the band.
    """

    shares: np.ndarray

    @property
    def median_share(self) -> float:
        valid = self.shares[~np.isnan(self.shares)]
        return float(np.median(valid)) if valid.size else float("nan")

    @property
    def min_share(self) -> float:
        valid = self.shares[~np.isnan(self.shares)]
        return float(valid.min()) if valid.size else float("nan")


def concentration_report(p: PowerMatrix) -> ConcentrationReport:
    power = np.asarray(p.p, dtype=float)
    totals = power.sum(axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        shares = np.where(totals > 0, power.max(axis=1, initial=0.0) / totals, np.nan)
    return ConcentrationReport(shares)


# ---------------------------------------------------------------------------
# Solver
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OuterIterate:
    """Summary of one surrogate refit."""

    outer: int
    sweeps: int
    rate_bps: float
    objective_bps: float
    max_rel_change: float
    max_lambda: float


@dataclass(frozen=True)
class PowerSolution:
    """Result of ``solve_power_continuous``.

    ``power`` and ``rate`` belong to the best solution by discrete sum rate.
    ``duals`` and ``history`` describe the surrogate iterations; when
    ``refined`` is set the returned powers come from the refinement pass
    instead of a surrogate iterate.
    """

    power: PowerMatrix
    rate: float
    converged: bool
    outer_iterations: int
    sweeps: int
    duals: DualVariables
    history: List[OuterIterate] = field(default_factory=list)
    refined: bool = False


def _initial_power(
    view: CellView,
    active: np.ndarray,
    init_power: Optional[np.ndarray],
) -> np.ndarray:
    counts = active.sum(axis=1, keepdims=True)
    share = np.divide(active, counts, out=np.zeros(active.shape), where=counts > 0)
    if init_power is not None:
        return np.asarray(init_power, dtype=float)[:, None, :] * share
    links = active.sum(axis=(1, 2))
    per_link = np.divide(view.budgets, links, out=np.zeros(view.num_users), where=links > 0)
    return np.where(active, per_link[:, None, None], 0.0)


def _damped(p: np.ndarray, target: np.ndarray, budgets: np.ndarray, duals: DualVariables) -> np.ndarray:
    """Geometric mean of the current and updated powers.

    Users whose multiplier binds are scaled back onto their budget.
    """
    mixed = np.sqrt(p * target)
    totals = mixed.sum(axis=(1, 2))
    refill = (duals.lambdas > 0) & (totals > 0)
    scale = np.divide(budgets, totals, out=np.ones_like(totals), where=refill)
    return mixed * scale[:, None, None]


def solve_power_continuous(
    view: CellView,
    settings: Optional[SolverSettings] = None,
    init_assignment: Optional[ChannelAssignment] = None,
    init_power: Optional[np.ndarray] = None,
) -> PowerSolution:
    """Maximise the cell's sum rate over per-link powers.

    Runs surrogate refits over fixed-point sweeps, keeps the iterate with the
    best discrete sum rate and, unless ``settings.refine`` is off, hands it to
    ``refine_band_powers`` so (user, band) pairs can also be switched off.

    Args:
        view: Cell view
        settings: Iteration limits and tolerances
        init_assignment: Start with ``alpha`` equal to this assignment instead of
            ``alpha = 1``; unassigned links then stay silent
        init_power: ``(U, K)`` per-user-band powers to start from, spread over
            the active links; defaults to an even split of every budget

    Returns:
        The best solution found
    """
    settings = settings or SolverSettings()
    shape = view.shape
    budgets = np.asarray(view.budgets, dtype=float)

    if view.is_empty:
        return PowerSolution(
            power=PowerMatrix(np.zeros(shape)),
            rate=0.0,
            converged=True,
            outer_iterations=0,
            sweeps=0,
            duals=DualVariables(np.zeros(0)),
        )

    if init_assignment is not None:
        coeffs = SurrogateCoefficients.from_assignment(init_assignment.gamma)
    else:
        coeffs = SurrogateCoefficients.uniform(shape)
    allowed = coeffs.active.copy()
    active = allowed.copy()
    floor = settings.power_floor

    p = _initial_power(view, active, init_power)
    p = _fit_budget(np.where(active, np.maximum(p, floor), 0.0), budgets)

    pinned = np.zeros(shape, dtype=int)
    duals = DualVariables(np.zeros(view.num_users))
    best_p, best_rate, best_duals = p, -math.inf, duals
    prev_rate: Optional[float] = None
    converged = False
    total_sweeps = 0
    history: List[OuterIterate] = []
    outer = 0

    for outer in range(1, settings.outer_max + 1):
        inner_limit = min(settings.inner_max, settings.sweep_budget - total_sweeps)
        if inner_limit <= 0:
            logger.debug(f"sweep budget of {settings.sweep_budget} used up at outer {outer}")
            outer -= 1
            break

        change = math.inf
        smallest = math.inf
        stalled = 0
        damped = False
        sweeps = 0
        for sweeps in range(1, inner_limit + 1):
            alpha = SurrogateCoefficients(np.where(active, coeffs.alpha, 0.0), coeffs.beta)
            update, duals = fixed_point_sweep(
                view, PowerMatrix(p), alpha, budgets, settings.lambda_tol
            )
            raw = update.p

            # Links pinned at the floor for several sweeps are switched off
            pinned = np.where(active & (raw <= floor), pinned + 1, 0)
            frozen = pinned >= settings.freeze_after
            if np.any(frozen):
                active &= ~frozen
                pinned[frozen] = 0

            target = np.where(active, np.maximum(raw, floor), 0.0)
            if damped:
                target = _damped(p, target, budgets, duals)
            nxt = _fit_budget(target, budgets)
            scale = max(float(p.max()), floor)
            change = float(np.max(np.abs(nxt - p)) / scale)
            p = nxt
            if change < settings.fp_tol:
                break

            # A sweep that fails to contract switches on damping
            if change < smallest:
                smallest, stalled = change, 0
            else:
                damped = True
                stalled += 1
                if stalled >= settings.stall_sweeps:
                    break
        total_sweeps += sweeps

        rate = cell_sum_rate(view, assignment_from_power(p), p.sum(axis=1))
        objective = continuous_sum_rate(view, p)
        history.append(
            OuterIterate(
                outer=outer,
                sweeps=sweeps,
                rate_bps=rate,
                objective_bps=objective,
                max_rel_change=change,
                max_lambda=duals.max,
            )
        )
        logger.debug(
            f"outer {outer}: {sweeps} sweeps, rate={rate:.6g} bps, "
            f"objective={objective:.6g} bps, change={change:.3g}"
        )

        if rate > best_rate:
            best_p, best_rate, best_duals = p, rate, duals

        if prev_rate is not None and abs(rate - prev_rate) <= settings.fp_tol * max(
            abs(prev_rate), np.finfo(float).tiny
        ):
            converged = True
            break
        prev_rate = rate

        z = sinr(view, p)
        if settings.debug_checks:
            violation = coeffs.max_violation(z)
            if violation > SURROGATE_CHECK_TOL:
                logger.warning(f"surrogate bound violated by {violation:.3g} at outer {outer}")
        coeffs = SurrogateCoefficients.at(z, active)

    if not converged:
        logger.debug(f"power solver stopped after {outer} outer iterations without converging")

    refined = False
    if settings.refine:
        starts = [best_p.sum(axis=1)]
        if init_power is not None:
            starts.append(np.where(allowed.any(axis=1), np.asarray(init_power, dtype=float), 0.0))
        result = refine_band_powers(view, starts, allowed, settings.refine_rounds)
        rate = cell_sum_rate(view, assignment_from_power(result.power), result.p_uk)
        if rate > best_rate:
            best_p, best_rate, refined = result.power, rate, True

    return PowerSolution(
        power=PowerMatrix(best_p),
        rate=max(best_rate, 0.0),
        converged=converged,
        outer_iterations=outer,
        sweeps=total_sweeps,
        duals=best_duals,
        history=history,
        refined=refined,
    )
