"""Monte Carlo experiment harness."""

from src.services.experiment.analysis import (
    PairedComparison,
    aggregate_records,
    best_scheme_summary,
    paired_comparison,
    summarize,
)
from src.services.experiment.loader import (
    apply_overrides,
    build_experiment_config,
    load_experiment_config,
)
from src.services.experiment.results import (
    AGGREGATE_COLUMNS,
    BEST_COLUMNS,
    RAW_COLUMNS,
    TRACE_COLUMNS,
    CsvResultWriter,
    read_aggregate_csv,
    read_raw_csv,
    write_csv,
)
from src.services.experiment.runner import (
    ExperimentRunner,
    TrialScenario,
    run_experiment,
    run_trial,
    solve_cell,
    trial_scenario,
)

__all__ = [
    "PairedComparison",
    "aggregate_records",
    "best_scheme_summary",
    "paired_comparison",
    "summarize",
    "apply_overrides",
    "build_experiment_config",
    "load_experiment_config",
    "AGGREGATE_COLUMNS",
    "BEST_COLUMNS",
    "RAW_COLUMNS",
    "TRACE_COLUMNS",
    "CsvResultWriter",
    "read_aggregate_csv",
    "read_raw_csv",
    "write_csv",
    "ExperimentRunner",
    "TrialScenario",
    "run_experiment",
    "run_trial",
    "solve_cell",
    "trial_scenario",
]
