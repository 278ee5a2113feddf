"""Utility module for vcell-sim."""

from src.utils.helpers import (
    derive_rng,
    derive_seed_sequence,
    format_duration,
    format_float,
    relabel_by_smallest_member,
)
from src.utils.logger import setup_logger
from src.utils.exceptions import (
    VCellError,
    ConfigurationError,
    ValidationError,
    ClusteringError,
    SpectralClusteringError,
    SolverError,
    PowerSolverError,
    ResultsIOError,
)

__all__ = [
    "derive_rng",
    "derive_seed_sequence",
    "format_duration",
    "format_float",
    "relabel_by_smallest_member",
    "setup_logger",
    "VCellError",
    "ConfigurationError",
    "ValidationError",
    "ClusteringError",
    "SpectralClusteringError",
    "SolverError",
    "PowerSolverError",
    "ResultsIOError",
]
