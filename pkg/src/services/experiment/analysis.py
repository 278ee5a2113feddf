"""Post-processing of aggregated and raw results."""

import math
from dataclasses import dataclass
from typing import Dict, Iterable, List, Sequence, Tuple

import numpy as np
from scipy import stats

from src.models.experiment import (
    AggregateResult,
    AggregateRow,
    BestSchemeRow,
    ConfigKey,
    TrialRecord,
)


def summarize(values: Sequence[float]) -> Tuple[float, float, float]:
    """Mean, sample standard deviation and standard error.

    The deviation uses ``ddof=1`` and is 0 for a single value.
    """
    data = np.asarray(values, dtype=float)
    n = data.size
    if n == 0:
        return math.nan, math.nan, math.nan
    mean = float(data.mean())
    std = float(data.std(ddof=1)) if n > 1 else 0.0
    return mean, std, std / math.sqrt(n)


def aggregate_records(records: Iterable[TrialRecord], total_trials: int = 0, failures: int = 0) -> AggregateResult:
    """Group records by configuration, in order of first appearance."""
    groups: Dict[ConfigKey, List[TrialRecord]] = {}
    for record in records:
        groups.setdefault(record.key(), []).append(record)

    rows = []
    for group in groups.values():
        first = group[0]
        mean, std, stderr = summarize([r.sum_rate_bps for r in group])
        rows.append(
            AggregateRow(
                clustering=first.clustering,
                sigma=first.sigma,
                affiliation=first.affiliation,
                scheme=first.scheme,
                num_cells=first.num_cells,
                eval_mode=first.eval_mode,
                mean_bps=mean,
                std_bps=std,
                stderr_bps=stderr,
                trials=len(group),
            )
        )
    return AggregateResult(rows=rows, total_trials=total_trials, failures=failures)


def best_scheme_summary(aggregate: AggregateResult) -> List[BestSchemeRow]:
    """Best scheme by mean rate for every clustering, affiliation and cell count.

    Ties keep the scheme that appears first.
    """
    best: Dict[tuple, AggregateRow] = {}
    for row in aggregate.rows:
        key = (row.clustering, row.sigma, row.affiliation, row.num_cells, row.eval_mode)
        if key not in best or row.mean_bps > best[key].mean_bps:
            best[key] = row
    return [
        BestSchemeRow(
            clustering=row.clustering,
            sigma=row.sigma,
            affiliation=row.affiliation,
            num_cells=row.num_cells,
            eval_mode=row.eval_mode,
            scheme=row.scheme,
            mean_bps=row.mean_bps,
            stderr_bps=row.stderr_bps,
        )
        for row in best.values()
    ]


@dataclass(frozen=True)
class PairedComparison:
    """One-sided paired test that configuration ``a`` beats ``b``.

    Attributes:
        n: Trials present for both configurations
        mean_difference: Mean of ``a - b`` in bits/s
        statistic: t statistic (NaN for fewer than two pairs)
        p_value: p-value of ``mean(a - b) > 0``
    """

    n: int
    mean_difference: float
    statistic: float
    p_value: float

    def significant(self, level: float = 0.05) -> bool:
        return not math.isnan(self.p_value) and self.p_value < level


def paired_comparison(records: Iterable[TrialRecord], a: ConfigKey, b: ConfigKey) -> PairedComparison:
    """Compare two configurations on the trials where both succeeded."""
    rates_a: Dict[int, float] = {}
    rates_b: Dict[int, float] = {}
    for record in records:
        if record.key() == a:
            rates_a[record.trial] = record.sum_rate_bps
        elif record.key() == b:
            rates_b[record.trial] = record.sum_rate_bps

    trials = sorted(rates_a.keys() & rates_b.keys())
    x = np.array([rates_a[t] for t in trials])
    y = np.array([rates_b[t] for t in trials])
    if len(trials) == 0:
        return PairedComparison(0, math.nan, math.nan, math.nan)
    diff = float(np.mean(x - y))
    if len(trials) < 2 or np.all(x - y == (x - y)[0]):
        return PairedComparison(len(trials), diff, math.nan, math.nan)

    result = stats.ttest_rel(x, y, alternative="greater")
    return PairedComparison(len(trials), diff, float(result.statistic), float(result.pvalue))
