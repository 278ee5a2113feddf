"""Seeded Monte Carlo experiment runner.

Every trial draws its own deployment and channels from a seed derived from
``(master_seed, trial_index)`` and evaluates every configured combination of
clustering, affiliation, scheme and number of virtual cells on them.
"""

import time
from concurrent.futures import ThreadPoolExecutor
from contextlib import ExitStack
from dataclasses import dataclass
from functools import partial
from pathlib import Path
from typing import Iterator, List, Optional, Tuple, Type, Union

from loguru import logger

from src.core.cells import (
    VirtualCellPartition,
    affiliate_best_channel,
    affiliate_closest,
    validate_partition,
)
from src.core.channel import alternating_solve, get_allocation_rule
from src.core.clustering import (
    Clustering,
    cut_dendrogram,
    hierarchical_cluster,
    kmeans_cluster,
    spectral_cluster,
)
from src.core.power import PowerSolution, solve_power_continuous
from src.core.rates import CellSolution, CellView, assignment_from_power, system_sum_rate
from src.core.scenario import generate_channels, generate_deployment
from src.models.experiment import (
    AffiliationRule,
    AggregateResult,
    ClusteringAlgorithm,
    CombinationFailure,
    ExperimentConfig,
    Scheme,
    TraceRow,
    TrialRecord,
    TrialResult,
)
from src.models.system import ChannelRealization, Deployment
from src.services.experiment.analysis import aggregate_records, best_scheme_summary
from src.services.experiment.results import (
    AGGREGATE_COLUMNS,
    BEST_COLUMNS,
    RAW_COLUMNS,
    TRACE_COLUMNS,
    CsvResultWriter,
    write_csv,
)
from src.utils.exceptions import ClusteringError, SolverError, ValidationError, VCellError
from src.utils.helpers import (
    STREAM_KMEANS,
    STREAM_SCENARIO,
    STREAM_SPECTRAL,
    derive_rng,
    format_duration,
)

PathLike = Union[str, Path]


@dataclass(frozen=True)
class TrialScenario:
    """Deployment and channels of one trial."""

    deployment: Deployment
    channels: ChannelRealization


def trial_scenario(cfg: ExperimentConfig, trial_index: int) -> TrialScenario:
    """Draw the network of a trial from its scenario stream."""
    rng = derive_rng(cfg.master_seed, trial_index, STREAM_SCENARIO)
    dep = generate_deployment(cfg.system, rng)
    chan = generate_channels(cfg.system, dep, rng)
    return TrialScenario(dep, chan)


def _as_vcell_error(exc: Exception, wrapper: Type[VCellError]) -> VCellError:
    """Keep package errors; wrap numerical library failures so one combination fails alone."""
    if isinstance(exc, VCellError):
        return exc
    return wrapper(f"{type(exc).__name__}: {exc}", cause=type(exc).__name__)


def _clusterings(
    cfg: ExperimentConfig,
    trial_index: int,
    dep: Deployment,
) -> Iterator[Tuple[ClusteringAlgorithm, Optional[float], int, Union[Clustering, VCellError]]]:
    """Yield ``(algorithm, sigma, m, clustering or error)`` for every requested cut.

    K-means streams are keyed by ``m`` and spectral streams by sigma position
    and ``m``, so a cut does not depend on which other cuts are requested.
    """
    points = dep.bs_positions
    for algorithm in cfg.clusterings:
        if algorithm == ClusteringAlgorithm.HIERARCHICAL:
            # One dendrogram serves every m
            dendrogram = hierarchical_cluster(points)
            for m in cfg.cell_counts:
                yield algorithm, None, m, cut_dendrogram(dendrogram, m)
        elif algorithm == ClusteringAlgorithm.KMEANS:
            for m in cfg.cell_counts:
                rng = derive_rng(cfg.master_seed, trial_index, STREAM_KMEANS, m)
                try:
                    clustering = kmeans_cluster(points, m, rng)
                except Exception as exc:
                    clustering = _as_vcell_error(exc, ClusteringError)
                yield algorithm, None, m, clustering
        else:
            for s, sigma in enumerate(cfg.sigmas):
                for m in cfg.cell_counts:
                    rng = derive_rng(cfg.master_seed, trial_index, STREAM_SPECTRAL, s, m)
                    try:
                        clustering = spectral_cluster(points, m, sigma, rng)
                    except Exception as exc:
                        clustering = _as_vcell_error(exc, ClusteringError)
                    yield algorithm, sigma, m, clustering


def _affiliate(
    cfg: ExperimentConfig,
    rule: AffiliationRule,
    scenario: TrialScenario,
    clustering: Clustering,
) -> VirtualCellPartition:
    if rule == AffiliationRule.CLOSEST:
        partition = affiliate_closest(scenario.deployment, clustering)
    else:
        partition = affiliate_best_channel(scenario.channels, clustering, cfg.best_channel_metric)
    check = validate_partition(partition, cfg.system.num_bs, cfg.system.num_users)
    if not check:
        raise ValidationError(f"Invalid virtual cell partition: {check.violation}")
    return partition


def solve_cell(
    cfg: ExperimentConfig,
    scheme: Scheme,
    view: CellView,
) -> Tuple[CellSolution, List[PowerSolution]]:
    """Solve one virtual cell with one scheme.

    Returns the discrete solution plus every power-solver call it made.
    """
    if scheme == Scheme.CONTINUOUS:
        solution = solve_power_continuous(view, cfg.solver)
        cell = CellSolution(
            assignment=assignment_from_power(solution.power.p),
            p_uk=solution.power.per_user_band,
            converged=solution.converged,
            iterations=solution.outer_iterations,
        )
        return cell, [solution]

    result = alternating_solve(view, get_allocation_rule(scheme), cfg.alternating, cfg.solver)
    cell = CellSolution(
        assignment=result.assignment,
        p_uk=result.p_uk,
        converged=result.converged,
        iterations=result.iterations,
    )
    return cell, result.power_solutions


def _trace_rows(
    trial_index: int,
    algorithm: ClusteringAlgorithm,
    sigma: Optional[float],
    rule: AffiliationRule,
    scheme: Scheme,
    m: int,
    cell: int,
    calls: List[PowerSolution],
) -> List[TraceRow]:
    return [
        TraceRow(
            trial=trial_index,
            clustering=algorithm.value,
            sigma=sigma,
            affiliation=rule.value,
            scheme=scheme.value,
            num_cells=m,
            cell=cell,
            call=call,
            outer=it.outer,
            sweeps=it.sweeps,
            rate_bps=it.rate_bps,
            objective_bps=it.objective_bps,
            max_rel_change=it.max_rel_change,
            max_lambda=it.max_lambda,
        )
        for call, solution in enumerate(calls)
        for it in solution.history
    ]


def run_trial(cfg: ExperimentConfig, trial_index: int) -> TrialResult:
    """Run every configured combination on one random network.

    Failures of single combinations are recorded and the trial goes on.
    """
    result = TrialResult(trial_index=trial_index)
    scenario = trial_scenario(cfg, trial_index)
    band_widths = cfg.system.band_widths()
    budgets = cfg.system.budgets_mw()

    for algorithm, sigma, m, clustering in _clusterings(cfg, trial_index, scenario.deployment):
        if isinstance(clustering, VCellError):
            logger.warning(f"Trial {trial_index}: {algorithm.value} m={m} failed: {clustering.message}")
            result.failures.append(
                CombinationFailure(
                    trial=trial_index,
                    clustering=algorithm,
                    sigma=sigma,
                    num_cells=m,
                    error_code=clustering.error_code,
                    message=clustering.message,
                )
            )
            continue

        for rule in cfg.affiliations:
            for scheme in cfg.schemes:
                try:
                    partition = _affiliate(cfg, rule, scenario, clustering)
                    solutions = []
                    for v, cell in enumerate(partition.cells):
                        view = CellView.from_cell(cell, scenario.channels, band_widths, budgets)
                        solution, calls = solve_cell(cfg, scheme, view)
                        solutions.append(solution)
                        if cfg.trace:
                            result.traces.extend(
                                _trace_rows(trial_index, algorithm, sigma, rule, scheme, m, v, calls)
                            )
                    rate = system_sum_rate(
                        partition, scenario.channels, band_widths, solutions, cfg.eval_mode
                    )
                except Exception as exc:
                    e = _as_vcell_error(exc, SolverError)
                    logger.error(
                        f"Trial {trial_index}: {algorithm.value}/{rule.value}/{scheme.value} "
                        f"m={m} failed: {e.message}"
                    )
                    result.failures.append(
                        CombinationFailure(
                            trial=trial_index,
                            clustering=algorithm,
                            sigma=sigma,
                            affiliation=rule,
                            scheme=scheme,
                            num_cells=m,
                            error_code=e.error_code,
                            message=e.message,
                        )
                    )
                    continue

                result.records.append(
                    TrialRecord(
                        trial=trial_index,
                        clustering=algorithm,
                        sigma=sigma,
                        affiliation=rule,
                        scheme=scheme,
                        num_cells=m,
                        eval_mode=cfg.eval_mode,
                        sum_rate_bps=max(rate, 0.0),
                        converged=all(s.converged for s in solutions),
                        iterations=sum(s.iterations for s in solutions),
                    )
                )
    return result


class ExperimentRunner:
    """Runs the trials of an experiment and writes result files.

    Trials run on a thread pool; results are consumed in trial order, so the
    raw file is identical for any number of workers.
    """

    def __init__(self, cfg: ExperimentConfig, workers: int = 1):
        self.cfg = cfg
        self.workers = max(1, int(workers))

    def trials(self) -> Iterator[TrialResult]:
        """Yield trial results in trial order."""
        job = partial(run_trial, self.cfg)
        indices = range(self.cfg.trials)
        if self.workers == 1:
            yield from map(job, indices)
            return
        with ThreadPoolExecutor(max_workers=self.workers) as pool:
            yield from pool.map(job, indices)

    def run(
        self,
        raw_path: Optional[PathLike] = None,
        agg_path: Optional[PathLike] = None,
        best_path: Optional[PathLike] = None,
        trace_path: Optional[PathLike] = None,
    ) -> AggregateResult:
        """Run all trials and aggregate them.

        Raw and trace rows are flushed after every trial. Failed combinations
        are logged and left out of every file.

        Raises:
            ResultsIOError: A result file cannot be written
        """
        start = time.monotonic()
        records: List[TrialRecord] = []
        failures = 0
        logger.info(
            f"Running {self.cfg.trials} trials with {self.workers} worker(s), "
            f"master seed {self.cfg.master_seed}"
        )

        with ExitStack() as stack:
            raw = stack.enter_context(CsvResultWriter(raw_path, RAW_COLUMNS)) if raw_path else None
            trace = (
                stack.enter_context(CsvResultWriter(trace_path, TRACE_COLUMNS))
                if trace_path
                else None
            )
            for trial in self.trials():
                records.extend(trial.records)
                failures += len(trial.failures)
                if raw is not None:
                    raw.write_rows(trial.records)
                if trace is not None:
                    trace.write_rows(trial.traces)
                logger.info(
                    f"Trial {trial.trial_index + 1}/{self.cfg.trials}: "
                    f"{len(trial.records)} results, {len(trial.failures)} failures"
                )

        aggregate = aggregate_records(records, total_trials=self.cfg.trials, failures=failures)
        if agg_path:
            write_csv(aggregate.rows, agg_path, AGGREGATE_COLUMNS)
        if best_path:
            write_csv(best_scheme_summary(aggregate), best_path, BEST_COLUMNS)

        logger.info(
            f"Finished {self.cfg.trials} trials in {format_duration(time.monotonic() - start)} "
            f"({len(aggregate.rows)} configurations, {failures} failures)"
        )
        return aggregate


def run_experiment(
    cfg: ExperimentConfig,
    workers: int = 1,
    raw_path: Optional[PathLike] = None,
    agg_path: Optional[PathLike] = None,
    best_path: Optional[PathLike] = None,
    trace_path: Optional[PathLike] = None,
) -> AggregateResult:
    """Run an experiment; see :meth:`ExperimentRunner.run`."""
    return ExperimentRunner(cfg, workers).run(raw_path, agg_path, best_path, trace_path)
