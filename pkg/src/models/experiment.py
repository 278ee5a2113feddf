"""Experiment configuration and result models."""

import math
from enum import Enum
from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from src.models.allocation import AlternatingSettings, SolverSettings
from src.models.system import SystemConfig

SPECTRAL_SIGMAS = [math.sqrt(1000.0), 1000.0]


class ClusteringAlgorithm(str, Enum):
    """Base-station clustering algorithms."""
    HIERARCHICAL = "hierarchical"
    KMEANS = "kmeans"
    SPECTRAL = "spectral"


class AffiliationRule(str, Enum):
    """User affiliation rules."""
    CLOSEST = "closest"
    BEST_CHANNEL = "best-channel"

    @classmethod
    def parse(cls, value: str) -> "AffiliationRule":
        aliases = {"best": cls.BEST_CHANNEL, "best_channel": cls.BEST_CHANNEL}
        value = value.strip().lower()
        return aliases.get(value) or cls(value)


class Scheme(str, Enum):
    """Per-cell resource allocation schemes."""
    CONTINUOUS = "continuous"
    UC = "uc"
    BSC = "bsc"
    MSRM = "msrm"


class EvalMode(str, Enum):
    """Whether evaluation counts interference from other virtual cells."""
    GLOBAL = "global"
    LOCAL = "local"


class ChannelMetric(str, Enum):
    """Scalarisation of a multi-band channel for best-channel affiliation."""
    MAX = "max"
    MEAN = "mean"


ConfigKey = Tuple[str, Optional[float], str, str, int, str]


class ExperimentConfig(BaseModel):
    """Monte Carlo sweep definition."""

    model_config = ConfigDict(extra="forbid")

    system: SystemConfig = Field(default_factory=SystemConfig)
    trials: int = Field(default=100, ge=1)
    master_seed: int = Field(default=0, ge=0)
    # Defaults to every m from 1 to num_bs
    cell_counts: List[int] = Field(default_factory=list)
    clusterings: List[ClusteringAlgorithm] = Field(
        default_factory=lambda: [ClusteringAlgorithm.HIERARCHICAL]
    )
    sigmas: List[float] = Field(default_factory=lambda: list(SPECTRAL_SIGMAS))
    affiliations: List[AffiliationRule] = Field(
        default_factory=lambda: [AffiliationRule.CLOSEST, AffiliationRule.BEST_CHANNEL]
    )
    schemes: List[Scheme] = Field(default_factory=lambda: list(Scheme))
    eval_mode: EvalMode = EvalMode.GLOBAL
    best_channel_metric: ChannelMetric = ChannelMetric.MAX
    solver: SolverSettings = Field(default_factory=SolverSettings)
    alternating: AlternatingSettings = Field(default_factory=AlternatingSettings)
    trace: bool = False

    @field_validator("affiliations", mode="before")
    @classmethod
    def parse_affiliations(cls, v):
        if isinstance(v, (list, tuple)):
            return [AffiliationRule.parse(x) if isinstance(x, str) else x for x in v]
        return v

    @field_validator("sigmas")
    @classmethod
    def validate_sigmas(cls, v):
        if any(not (s > 0 and math.isfinite(s)) for s in v):
            raise ValueError(f"Spectral sigmas must be positive: {v}")
        return v

    @model_validator(mode="after")
    def check_cell_counts(self) -> "ExperimentConfig":
        if "cell_counts" not in self.model_fields_set:
            self.cell_counts = list(range(1, self.system.num_bs + 1))
        if not self.cell_counts:
            raise ValueError("cell_counts must not be empty")
        bad = [m for m in self.cell_counts if not 1 <= m <= self.system.num_bs]
        if bad:
            raise ValueError(f"cell_counts {bad} outside [1, {self.system.num_bs}]")
        # Keep first occurrence order, drop repeats
        self.cell_counts = list(dict.fromkeys(self.cell_counts))
        for name in ("clusterings", "affiliations", "schemes"):
            values = getattr(self, name)
            if not values:
                raise ValueError(f"{name} must not be empty")
            setattr(self, name, list(dict.fromkeys(values)))
        if ClusteringAlgorithm.SPECTRAL in self.clusterings and not self.sigmas:
            raise ValueError("spectral clustering needs at least one sigma")
        return self


class TrialRecord(BaseModel):
    """Sum rate of one configuration in one trial."""

    trial: int
    clustering: ClusteringAlgorithm
    sigma: Optional[float] = None
    affiliation: AffiliationRule
    scheme: Scheme
    num_cells: int
    eval_mode: EvalMode
    sum_rate_bps: float = Field(ge=0)
    converged: bool = True
    iterations: int = 0

    def key(self) -> ConfigKey:
        return (
            self.clustering.value,
            self.sigma,
            self.affiliation.value,
            self.scheme.value,
            self.num_cells,
            self.eval_mode.value,
        )


class CombinationFailure(BaseModel):
    """A configuration that raised inside a trial."""

    trial: int
    clustering: ClusteringAlgorithm
    sigma: Optional[float] = None
    affiliation: Optional[AffiliationRule] = None
    scheme: Optional[Scheme] = None
    num_cells: int
    error_code: str
    message: str


class TraceRow(BaseModel):
    """One outer iteration of a power-solver call."""

    trial: int
    clustering: str
    sigma: Optional[float] = None
    affiliation: str
    scheme: str
    num_cells: int
    cell: int
    call: int
    outer: int
    sweeps: int
    rate_bps: float
    objective_bps: float
    max_rel_change: float
    max_lambda: float


class TrialResult(BaseModel):
    """Everything one trial produced."""

    trial_index: int
    records: List[TrialRecord] = Field(default_factory=list)
    failures: List[CombinationFailure] = Field(default_factory=list)
    traces: List[TraceRow] = Field(default_factory=list)


class AggregateRow(BaseModel):
    """Statistics of one configuration across trials."""

    clustering: ClusteringAlgorithm
    sigma: Optional[float] = None
    affiliation: AffiliationRule
    scheme: Scheme
    num_cells: int
    eval_mode: EvalMode
    mean_bps: float
    std_bps: float
    stderr_bps: float
    trials: int

    def key(self) -> ConfigKey:
        return (
            self.clustering.value,
            self.sigma,
            self.affiliation.value,
            self.scheme.value,
            self.num_cells,
            self.eval_mode.value,
        )


class BestSchemeRow(BaseModel):
    """Maximal mean over schemes for one clustering/affiliation/m."""

    clustering: ClusteringAlgorithm
    sigma: Optional[float] = None
    affiliation: AffiliationRule
    num_cells: int
    eval_mode: EvalMode
    scheme: Scheme
    mean_bps: float
    stderr_bps: float


class AggregateResult(BaseModel):
    """Aggregated sweep, ordered by first appearance of each configuration."""

    rows: List[AggregateRow] = Field(default_factory=list)
    total_trials: int = 0
    failures: int = 0

    def as_dict(self) -> Dict[ConfigKey, AggregateRow]:
        return {row.key(): row for row in self.rows}
