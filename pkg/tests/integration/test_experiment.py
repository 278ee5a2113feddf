"""Integration tests for the experiment runner and result files."""

import math

import numpy as np
import pytest

from src.core.cells import affiliate_closest
from src.core.clustering import cut_dendrogram, hierarchical_cluster
from src.core.scenario import link_distances
from src.models.allocation import AlternatingSettings, SolverSettings
from src.models.experiment import (
    AffiliationRule,
    AggregateResult,
    AggregateRow,
    ClusteringAlgorithm,
    EvalMode,
    ExperimentConfig,
    Scheme,
    TrialRecord,
)
from src.models.system import SystemConfig
from src.services.experiment import runner
from src.services.experiment import (
    RAW_COLUMNS,
    aggregate_records,
    best_scheme_summary,
    build_experiment_config,
    load_experiment_config,
    paired_comparison,
    read_aggregate_csv,
    read_raw_csv,
    run_experiment,
    run_trial,
    summarize,
    trial_scenario,
    write_csv,
)
from src.utils.exceptions import ConfigurationError, SpectralClusteringError
from tests.conftest import PRESETS_DIR


@pytest.fixture
def quick_config(reduced_config):
    """Reduced experiment with two schemes and two cell counts."""
    return reduced_config.model_copy(
        update={"schemes": [Scheme.CONTINUOUS, Scheme.BSC], "cell_counts": [1, 2]}
    )


def _record(trial, scheme, rate, m=2):
    return TrialRecord(
        trial=trial,
        clustering=ClusteringAlgorithm.HIERARCHICAL,
        affiliation=AffiliationRule.CLOSEST,
        scheme=scheme,
        num_cells=m,
        eval_mode=EvalMode.GLOBAL,
        sum_rate_bps=rate,
    )


class TestRunTrial:
    """Tests for a single Monte Carlo trial."""

    def test_deterministic(self, quick_config):
        """Test that a trial depends only on the seed and its index."""
        a = run_trial(quick_config, 0)
        b = run_trial(quick_config, 0)
        assert a.records == b.records
        assert a.records

    def test_every_combination_reported(self, quick_config):
        """Test one record per clustering, cut, affiliation and scheme."""
        result = run_trial(quick_config, 1)
        assert not result.failures
        # hierarchical, kmeans and one spectral sigma
        assert len(result.records) == 3 * 2 * 2 * 2
        assert all(r.sum_rate_bps > 0 for r in result.records)

    def test_single_cell_global_equals_local(self, quick_config):
        """Test that one virtual cell has no external interference to drop."""
        base = quick_config.model_copy(
            update={"cell_counts": [1], "clusterings": [ClusteringAlgorithm.HIERARCHICAL]}
        )
        global_ = run_trial(base.model_copy(update={"eval_mode": EvalMode.GLOBAL}), 0).records
        local = run_trial(base.model_copy(update={"eval_mode": EvalMode.LOCAL}), 0).records
        assert len(global_) == len(local)
        for g, l in zip(global_, local):
            assert g.sum_rate_bps == pytest.approx(l.sum_rate_bps, rel=1e-9)

    def test_one_bs_per_cell(self, quick_config):
        """Test that m = num_bs with closest affiliation gives one BS per cell."""
        scenario = trial_scenario(quick_config, 0)
        num_bs = quick_config.system.num_bs
        clustering = cut_dendrogram(hierarchical_cluster(scenario.deployment.bs_positions), num_bs)
        partition = affiliate_closest(scenario.deployment, clustering)
        nearest = link_distances(scenario.deployment).argmin(axis=1)
        for cell in partition.cells:
            assert len(cell.bs) == 1
            assert all(nearest[u] == cell.bs[0] for u in cell.users)

    def test_clustering_failure_recorded(self, quick_config, mocker):
        """Test that a failing clustering is skipped and reported."""
        mocker.patch(
            "src.services.experiment.runner.spectral_cluster",
            side_effect=SpectralClusteringError("isolated point"),
        )
        result = run_trial(quick_config, 0)
        assert len(result.failures) == 2
        assert all(f.error_code == "SPECTRAL_ERROR" for f in result.failures)
        assert all(r.clustering != ClusteringAlgorithm.SPECTRAL for r in result.records)
        assert len(result.records) == 2 * 2 * 2 * 2

    def test_library_error_in_solver_recorded(self, quick_config, mocker):
        """Test that a numerical library failure fails only its own combination."""
        solve = runner.solve_cell

        def failing_bsc(cfg, scheme, view):
            if scheme == Scheme.BSC:
                raise np.linalg.LinAlgError("Singular matrix")
            return solve(cfg, scheme, view)

        mocker.patch("src.services.experiment.runner.solve_cell", side_effect=failing_bsc)
        result = run_trial(quick_config, 0)
        # three clusterings, two cuts, two affiliation rules
        assert len(result.failures) == 3 * 2 * 2
        assert all(f.error_code == "SOLVER_ERROR" for f in result.failures)
        assert all(f.scheme == Scheme.BSC for f in result.failures)
        assert "LinAlgError" in result.failures[0].message
        assert len(result.records) == 3 * 2 * 2
        assert all(r.scheme == Scheme.CONTINUOUS for r in result.records)

    def test_library_error_in_clustering_recorded(self, quick_config, mocker):
        """Test that a K-means library failure is reported as a clustering error."""
        mocker.patch(
            "src.services.experiment.runner.kmeans_cluster",
            side_effect=ValueError("n_samples should be >= n_clusters"),
        )
        result = run_trial(quick_config, 0)
        assert len(result.failures) == 2
        assert all(f.error_code == "CLUSTERING_ERROR" for f in result.failures)
        assert all(f.clustering == ClusteringAlgorithm.KMEANS for f in result.failures)
        assert len(result.records) == 2 * 2 * 2 * 2

    def test_trace_rows(self, quick_config):
        """Test that tracing records every outer iteration."""
        cfg = quick_config.model_copy(
            update={"trace": True, "clusterings": [ClusteringAlgorithm.HIERARCHICAL], "schemes": [Scheme.CONTINUOUS]}
        )
        result = run_trial(cfg, 0)
        assert result.traces
        assert all(t.rate_bps >= 0 for t in result.traces)
        assert {t.num_cells for t in result.traces} == {1, 2}


class TestRunExperiment:
    """Tests for the full sweep and its files."""

    def test_worker_count_does_not_change_output(self, quick_config, tmp_path):
        """Test byte-identical raw files for 1 and 8 workers."""
        run_experiment(quick_config, workers=1, raw_path=tmp_path / "serial.csv")
        run_experiment(quick_config, workers=8, raw_path=tmp_path / "parallel.csv")
        assert (tmp_path / "serial.csv").read_bytes() == (tmp_path / "parallel.csv").read_bytes()

    def test_more_trials_extend_the_raw_file(self, quick_config, tmp_path):
        """Test that a trial's rows do not depend on the trial count."""
        run_experiment(quick_config.model_copy(update={"trials": 1}), raw_path=tmp_path / "one.csv")
        run_experiment(quick_config, raw_path=tmp_path / "two.csv")
        one = (tmp_path / "one.csv").read_text(encoding="utf-8").splitlines()
        two = (tmp_path / "two.csv").read_text(encoding="utf-8").splitlines()
        assert len(two) > len(one)
        assert two[: len(one)] == one

    def test_single_trial_aggregate(self, quick_config, tmp_path):
        """Test that one trial aggregates to itself with zero spread."""
        cfg = quick_config.model_copy(update={"trials": 1})
        aggregate = run_experiment(cfg, raw_path=tmp_path / "raw.csv", agg_path=tmp_path / "agg.csv")
        records = {r.key(): r for r in read_raw_csv(tmp_path / "raw.csv")}
        assert len(aggregate.rows) == len(records)
        for row in aggregate.rows:
            assert row.mean_bps == records[row.key()].sum_rate_bps
            assert row.std_bps == 0.0
            assert row.stderr_bps == 0.0
            assert row.trials == 1

    def test_files_round_trip(self, quick_config, tmp_path):
        """Test that written files parse back to the in-memory results."""
        paths = {name: tmp_path / f"{name}.csv" for name in ("raw", "agg", "best")}
        aggregate = run_experiment(
            quick_config, raw_path=paths["raw"], agg_path=paths["agg"], best_path=paths["best"]
        )
        assert read_aggregate_csv(paths["agg"]) == aggregate.rows

        records = read_raw_csv(paths["raw"])
        assert len(records) == sum(row.trials for row in aggregate.rows)
        assert aggregate_records(records).rows == aggregate.rows

        best_lines = paths["best"].read_text(encoding="utf-8").splitlines()
        assert len(best_lines) == 1 + len(best_scheme_summary(aggregate))

    def test_failures_left_out_of_files(self, quick_config, tmp_path, mocker):
        """Test that failed combinations appear only in the failure count."""
        mocker.patch(
            "src.services.experiment.runner.spectral_cluster",
            side_effect=SpectralClusteringError("isolated point"),
        )
        aggregate = run_experiment(quick_config, raw_path=tmp_path / "raw.csv")
        assert aggregate.failures == 2 * quick_config.trials
        assert all(r.clustering != ClusteringAlgorithm.SPECTRAL for r in read_raw_csv(tmp_path / "raw.csv"))

    @pytest.mark.slow
    def test_reduced_preset(self, tmp_path):
        """Test the reduced preset end to end."""
        cfg = load_experiment_config(PRESETS_DIR / "reduced.json")
        aggregate = run_experiment(cfg, workers=2, raw_path=tmp_path / "raw.csv")
        assert aggregate.failures == 0
        assert len(read_raw_csv(tmp_path / "raw.csv")) == cfg.trials * 3 * 3 * 2 * 4
        assert all(row.trials == cfg.trials for row in aggregate.rows)


def _key(clustering, rule, m, sigma=None, scheme=Scheme.BSC):
    return (clustering.value, sigma, rule.value, scheme.value, m, EvalMode.GLOBAL.value)


@pytest.mark.slow
class TestTrends:
    """Qualitative trends of the sum rate over many random networks."""

    @pytest.fixture(scope="class")
    def cell_count_records(self, tmp_path_factory):
        cfg = ExperimentConfig(
            system=SystemConfig(num_bs=10, num_users=40, num_bands=4),
            trials=30,
            master_seed=2024,
            cell_counts=[1, 10],
            clusterings=[ClusteringAlgorithm.HIERARCHICAL],
            affiliations=[AffiliationRule.CLOSEST, AffiliationRule.BEST_CHANNEL],
            schemes=[Scheme.BSC],
            solver=SolverSettings(outer_max=5, inner_max=50),
            alternating=AlternatingSettings(n_max=5),
        )
        path = tmp_path_factory.mktemp("trends") / "raw.csv"
        aggregate = run_experiment(cfg, workers=4, raw_path=path)
        assert aggregate.failures == 0
        return read_raw_csv(path)

    def test_one_cell_beats_one_cell_per_bs(self, cell_count_records):
        """Test that full cooperation wins, by a bounded margin."""
        rule = AffiliationRule.CLOSEST
        one = _key(ClusteringAlgorithm.HIERARCHICAL, rule, 1)
        ten = _key(ClusteringAlgorithm.HIERARCHICAL, rule, 10)
        comparison = paired_comparison(cell_count_records, one, ten)
        assert comparison.n == 30
        assert comparison.significant(0.01)

        means = {
            m: np.mean([r.sum_rate_bps for r in cell_count_records if r.key() == key])
            for m, key in ((1, one), (10, ten))
        }
        assert 0.4 <= means[10] / means[1] <= 1.0

    def test_best_channel_affiliation_with_many_cells(self, cell_count_records):
        """Test that best-channel affiliation is no worse than closest-BS at one BS per cell."""
        best = _key(ClusteringAlgorithm.HIERARCHICAL, AffiliationRule.BEST_CHANNEL, 10)
        closest = _key(ClusteringAlgorithm.HIERARCHICAL, AffiliationRule.CLOSEST, 10)
        assert paired_comparison(cell_count_records, best, closest).mean_difference >= 0.0

    def test_hierarchical_against_baselines(self, tmp_path):
        """Test hierarchical clustering against K-means and spectral clustering over every cut."""
        cfg = ExperimentConfig(
            system=SystemConfig(num_bs=10, num_users=20, num_bands=2),
            trials=20,
            master_seed=2024,
            cell_counts=list(range(1, 11)),
            clusterings=list(ClusteringAlgorithm),
            sigmas=[1000.0],
            affiliations=[AffiliationRule.CLOSEST],
            schemes=[Scheme.BSC],
            solver=SolverSettings(outer_max=5, inner_max=50),
            alternating=AlternatingSettings(n_max=5),
        )
        best = best_scheme_summary(run_experiment(cfg, workers=4, raw_path=tmp_path / "raw.csv"))
        rows = {(b.clustering, b.num_cells): b for b in best}

        for baseline in (ClusteringAlgorithm.KMEANS, ClusteringAlgorithm.SPECTRAL):
            holds = 0
            for m in cfg.cell_counts:
                hier = rows[(ClusteringAlgorithm.HIERARCHICAL, m)]
                other = rows.get((baseline, m))
                if other is None or hier.mean_bps >= other.mean_bps - other.stderr_bps:
                    holds += 1
            assert holds >= 8, baseline


class TestResultFiles:
    """Tests for CSV formatting."""

    def test_empty_results_header_only(self, tmp_path):
        """Test that no rows still produce a header."""
        path = tmp_path / "raw.csv"
        assert write_csv([], path, RAW_COLUMNS) == 0
        assert path.read_text(encoding="utf-8") == ",".join(RAW_COLUMNS) + "\n"
        assert read_raw_csv(path) == []

    def test_single_record(self, tmp_path):
        """Test the formatting of one record."""
        path = tmp_path / "raw.csv"
        write_csv([_record(0, Scheme.UC, 0.1)], path, RAW_COLUMNS)
        lines = path.read_text(encoding="utf-8").splitlines()
        assert len(lines) == 2
        assert lines[1] == "0,hierarchical,,closest,uc,2,global,0.1,true"

    def test_creates_parent_directories(self, tmp_path):
        """Test that missing output directories are created."""
        path = tmp_path / "nested" / "dir" / "raw.csv"
        write_csv([_record(0, Scheme.UC, 1.0)], path, RAW_COLUMNS)
        assert path.exists()

    def test_header_checked_on_read(self, tmp_path):
        """Test that a foreign file is rejected."""
        from src.utils.exceptions import ResultsIOError

        path = tmp_path / "other.csv"
        path.write_text("a,b\n1,2\n", encoding="utf-8")
        with pytest.raises(ResultsIOError):
            read_raw_csv(path)


class TestAnalysis:
    """Tests for aggregation and comparisons."""

    def test_summarize(self):
        """Test mean, sample deviation and standard error."""
        mean, std, stderr = summarize([1.0, 2.0, 3.0])
        assert mean == pytest.approx(2.0)
        assert std == pytest.approx(1.0)
        assert stderr == pytest.approx(1.0 / math.sqrt(3.0))

    def test_summarize_single_value(self):
        """Test zero spread for one value."""
        assert summarize([5.0]) == (5.0, 0.0, 0.0)

    def test_aggregate_order_of_first_appearance(self):
        """Test grouping and row order."""
        records = [
            _record(0, Scheme.BSC, 4.0),
            _record(0, Scheme.UC, 1.0),
            _record(1, Scheme.BSC, 6.0),
            _record(1, Scheme.UC, 3.0),
        ]
        rows = aggregate_records(records, total_trials=2).rows
        assert [r.scheme for r in rows] == [Scheme.BSC, Scheme.UC]
        assert rows[0].mean_bps == pytest.approx(5.0)
        assert rows[1].std_bps == pytest.approx(math.sqrt(2.0))
        assert rows[0].trials == 2

    def test_best_scheme_summary(self):
        """Test that the highest mean wins and ties keep the first scheme."""

        def row(scheme, mean, m):
            return AggregateRow(
                clustering=ClusteringAlgorithm.HIERARCHICAL,
                affiliation=AffiliationRule.CLOSEST,
                scheme=scheme,
                num_cells=m,
                eval_mode=EvalMode.GLOBAL,
                mean_bps=mean,
                std_bps=0.0,
                stderr_bps=0.0,
                trials=1,
            )

        aggregate = AggregateResult(
            rows=[
                row(Scheme.CONTINUOUS, 5.0, 1),
                row(Scheme.MSRM, 7.0, 1),
                row(Scheme.UC, 3.0, 2),
                row(Scheme.BSC, 3.0, 2),
            ]
        )
        best = best_scheme_summary(aggregate)
        assert [(b.num_cells, b.scheme) for b in best] == [(1, Scheme.MSRM), (2, Scheme.UC)]

    def test_paired_comparison(self):
        """Test a consistent advantage is significant."""
        records = []
        for t, gain in enumerate([1.0, 1.5, 0.8, 1.2, 1.1]):
            records.append(_record(t, Scheme.MSRM, 10.0 + t + gain))
            records.append(_record(t, Scheme.UC, 10.0 + t))
        a = records[0].key()
        b = records[1].key()
        result = paired_comparison(records, a, b)
        assert result.n == 5
        assert result.mean_difference == pytest.approx(1.12)
        assert result.significant()
        assert not paired_comparison(records, b, a).significant()

    def test_paired_comparison_too_few_trials(self):
        """Test that one pair gives no test."""
        records = [_record(0, Scheme.MSRM, 2.0), _record(0, Scheme.UC, 1.0)]
        result = paired_comparison(records, records[0].key(), records[1].key())
        assert result.n == 1
        assert math.isnan(result.p_value)
        assert not result.significant()


class TestLoader:
    """Tests for experiment config files."""

    def test_json_preset(self):
        """Test the reduced JSON preset."""
        cfg = load_experiment_config(PRESETS_DIR / "reduced.json")
        assert cfg.system.num_bs == 4
        assert cfg.cell_counts == [1, 2, 4]
        assert cfg.sigmas == [1000.0]

    def test_yaml_preset(self):
        """Test the reduced YAML preset."""
        cfg = load_experiment_config(PRESETS_DIR / "reduced.yaml")
        assert cfg.clusterings == [ClusteringAlgorithm.HIERARCHICAL]
        assert cfg.eval_mode == EvalMode.LOCAL
        assert cfg.affiliations == [AffiliationRule.CLOSEST, AffiliationRule.BEST_CHANNEL]

    def test_flat_system_mapping(self):
        """Test that bare system parameters are accepted."""
        cfg = build_experiment_config({"num_bs": 3, "num_users": 6, "num_bands": 2})
        assert cfg.system.num_bs == 3
        assert cfg.trials == 100

    def test_invalid_values(self, tmp_path):
        """Test that validation errors become configuration errors."""
        path = tmp_path / "bad.json"
        path.write_text('{"system": {"num_bs": 2}, "cell_counts": [3]}', encoding="utf-8")
        with pytest.raises(ConfigurationError):
            load_experiment_config(path)

    def test_unparsable_file(self, tmp_path):
        """Test malformed JSON."""
        path = tmp_path / "bad.json"
        path.write_text("{not json", encoding="utf-8")
        with pytest.raises(ConfigurationError):
            load_experiment_config(path)

    def test_missing_file(self, tmp_path):
        """Test a path that does not exist."""
        with pytest.raises(ConfigurationError):
            load_experiment_config(tmp_path / "missing.json")
