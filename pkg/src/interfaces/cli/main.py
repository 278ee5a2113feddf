"""Command line entry point: ``vcell-sim run`` and ``vcell-sim validate``."""

import argparse
import sys
from pathlib import Path
from typing import List, Optional

# Add project root to path
project_root = Path(__file__).parent.parent.parent.parent
sys.path.insert(0, str(project_root))

from loguru import logger

from config.settings import get_settings
from src.models.experiment import AffiliationRule, ClusteringAlgorithm, ExperimentConfig
from src.services.experiment import apply_overrides, load_experiment_config, run_experiment
from src.utils.exceptions import ConfigurationError, VCellError
from src.utils.helpers import parse_float_list, parse_int_list, parse_str_list
from src.utils.logger import setup_logger


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vcell-sim",
        description="Virtual-cell uplink resource allocation simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="Run a Monte Carlo experiment")
    run.add_argument("--config", required=True, help="Experiment config (JSON or YAML)")
    run.add_argument("--trials", type=int, help="Number of trials")
    run.add_argument("--seed", type=int, help="Master seed")
    run.add_argument("--cells", help="Virtual cell counts, e.g. 1,2,5-10")
    run.add_argument("--scheme", help="Schemes: continuous,uc,bsc,msrm")
    run.add_argument("--affiliation", help="Affiliation rules: closest,best")
    run.add_argument("--clustering", help="Clusterings: hierarchical,kmeans,spectral")
    run.add_argument("--sigma", help="Spectral clustering sigmas, e.g. 31.62,1000")
    run.add_argument("--eval", choices=["global", "local"], help="Interference counted at evaluation")
    run.add_argument("--out", help="Raw results CSV")
    run.add_argument("--agg", help="Aggregate results CSV")
    run.add_argument("--best", help="Best-scheme summary CSV")
    run.add_argument("--trace", help="Power solver trace CSV")
    run.add_argument("--workers", type=int, help="Worker threads")
    run.add_argument("--log-level", help="Log level")

    validate = sub.add_parser("validate", help="Check an experiment config")
    validate.add_argument("--config", required=True, help="Experiment config (JSON or YAML)")
    validate.add_argument("--log-level", help="Log level")
    return parser


def _overrides(args: argparse.Namespace) -> dict:
    try:
        return {
            "trials": args.trials,
            "master_seed": args.seed,
            "cell_counts": parse_int_list(args.cells) if args.cells else None,
            "schemes": parse_str_list(args.scheme) if args.scheme else None,
            "affiliations": (
                [AffiliationRule.parse(a).value for a in parse_str_list(args.affiliation)]
                if args.affiliation
                else None
            ),
            "clusterings": parse_str_list(args.clustering) if args.clustering else None,
            "sigmas": parse_float_list(args.sigma) if args.sigma else None,
            "eval_mode": args.eval,
            "trace": True if args.trace else None,
        }
    except ValueError as e:
        raise ConfigurationError(f"Invalid command line value: {e}")


def combinations_per_trial(cfg: ExperimentConfig) -> int:
    """Number of (clustering, sigma, affiliation, scheme, m) combinations."""
    clusterings = sum(
        len(cfg.sigmas) if c == ClusteringAlgorithm.SPECTRAL else 1 for c in cfg.clusterings
    )
    return clusterings * len(cfg.cell_counts) * len(cfg.affiliations) * len(cfg.schemes)


def cmd_run(args: argparse.Namespace) -> int:
    settings = get_settings()
    cfg = apply_overrides(load_experiment_config(args.config), **_overrides(args))
    workers = args.workers or settings.workers
    if workers < 1:
        raise ConfigurationError(f"--workers must be at least 1, got {workers}")

    raw_path = Path(args.out) if args.out else settings.output_dir / "raw.csv"
    agg_path = Path(args.agg) if args.agg else settings.output_dir / "aggregate.csv"
    logger.info(
        f"{combinations_per_trial(cfg)} combinations per trial, "
        f"{cfg.system.num_bs} BSs, {cfg.system.num_users} users, {cfg.system.num_bands} bands"
    )

    result = run_experiment(
        cfg,
        workers=workers,
        raw_path=raw_path,
        agg_path=agg_path,
        best_path=args.best,
        trace_path=args.trace,
    )
    print(f"Raw results:       {raw_path}")
    print(f"Aggregate results: {agg_path}")
    if result.failures:
        print(f"Failed combinations: {result.failures} (see log)")
    return 0


def cmd_validate(args: argparse.Namespace) -> int:
    cfg = load_experiment_config(args.config)
    print(f"Config OK: {args.config}")
    print(f"  system: {cfg.system.num_bs} BSs, {cfg.system.num_users} users, {cfg.system.num_bands} bands")
    print(f"  trials: {cfg.trials}, master seed: {cfg.master_seed}")
    print(f"  combinations per trial: {combinations_per_trial(cfg)}")
    return 0


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    settings = get_settings()
    setup_logger(
        log_level=(args.log_level or settings.log_level).upper(),
        log_dir=settings.log_dir if settings.log_to_file else None,
    )
    logger.debug(f"vcell-sim {args.command} in {settings.environment.value} environment")

    commands = {"run": cmd_run, "validate": cmd_validate}
    try:
        return commands[args.command](args)
    except VCellError as e:
        logger.error(f"{e.error_code}: {e.message}")
        print(f"Error: {e.message}", file=sys.stderr)
        return e.exit_code


if __name__ == "__main__":
    sys.exit(main())
