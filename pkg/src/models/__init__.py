"""Data models for vcell-sim."""

from src.models.system import SystemConfig, Deployment, ChannelRealization
from src.models.allocation import (
    PowerMatrix,
    ChannelAssignment,
    SolverSettings,
    AlternatingSettings,
)
from src.models.experiment import (
    AffiliationRule,
    AggregateResult,
    AggregateRow,
    BestSchemeRow,
    ChannelMetric,
    ClusteringAlgorithm,
    CombinationFailure,
    EvalMode,
    ExperimentConfig,
    Scheme,
    TraceRow,
    TrialRecord,
    TrialResult,
)

__all__ = [
    "SystemConfig",
    "Deployment",
    "ChannelRealization",
    "PowerMatrix",
    "ChannelAssignment",
    "SolverSettings",
    "AlternatingSettings",
    "AffiliationRule",
    "AggregateResult",
    "AggregateRow",
    "BestSchemeRow",
    "ChannelMetric",
    "ClusteringAlgorithm",
    "CombinationFailure",
    "EvalMode",
    "ExperimentConfig",
    "Scheme",
    "TraceRow",
    "TrialRecord",
    "TrialResult",
]
