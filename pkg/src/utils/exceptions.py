"""Custom exceptions for vcell-sim."""

from typing import Any, Dict, Optional


class VCellError(Exception):
    """Base exception for vcell-sim."""

    exit_code: int = 1
    error_code: str = "INTERNAL_ERROR"

    def __init__(self, message: Optional[str] = None, **context: Any):
        self.message = message or self.__class__.__doc__
        self.context: Dict[str, Any] = context
        super().__init__(self.message)

    def to_dict(self) -> dict:
        """Convert exception to a serialisable dict (CLI and failure records)."""
        return {
            "error": True,
            "error_code": self.error_code,
            "message": self.message,
            "context": self.context or None,
        }


class ConfigurationError(VCellError):
    """Configuration file or settings are invalid."""
    exit_code = 2
    error_code = "CONFIG_ERROR"


class ValidationError(VCellError):
    """An operation was called outside its contract."""
    exit_code = 2
    error_code = "VALIDATION_ERROR"


class ClusteringError(VCellError):
    """Base-station clustering failed."""
    error_code = "CLUSTERING_ERROR"


class SpectralClusteringError(ClusteringError):
    """Spectral embedding could not be computed."""
    error_code = "SPECTRAL_ERROR"


class SolverError(VCellError):
    """Resource allocation solver failed."""
    error_code = "SOLVER_ERROR"


class PowerSolverError(SolverError):
    """Power fixed-point iteration produced non-finite values."""
    error_code = "POWER_SOLVER_ERROR"


class ResultsIOError(VCellError):
    """Result files could not be written or read."""
    exit_code = 3
    error_code = "RESULTS_IO_ERROR"
