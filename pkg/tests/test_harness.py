import numpy as np
import pytest

from semra.corpus import save_corpus, synth_corpus
from semra.harness import (
    CSV_HEADER,
    ConfigError,
    ExperimentConfig,
    SweepResult,
    SweepRow,
    channel_for,
    convergence_epoch,
    convergence_report,
    corpus_for,
    emit_outputs,
    load_experiment_config,
    resolve_out_dir,
    run_budget_convergence,
    run_convergence,
    run_power_sweep,
)


def tiny_config(**overrides):
    base = dict(
        experiment="power_sweep",
        synth_images=2,
        synth_triplets=2,
        synth_seed=0,
        users=2,
        budgets_w=(300.0, 600.0),
        schemes=("equal", "importance"),
        t_list=(2,),
        epochs=6,
        batch_size=8,
        seeds=(0,),
        eval_samples=2,
    )
    base.update(overrides)
    return ExperimentConfig(**base)


class TestConfigLoading:
    def test_round_trip_from_toml(self, tmp_path):
        cfg_text = """
experiment = "power_sweep"
budgets_w = [400.0, 800.0]
schemes = ["equal", "importance"]
seeds = [0, 1]
epochs = 3
"""
        path = tmp_path / "exp.toml"
        path.write_text(cfg_text)
        config = load_experiment_config(path)
        assert config.experiment == "power_sweep"
        assert config.budgets_w == (400.0, 800.0)
        assert config.seeds == (0, 1)

    def test_unknown_key_rejected(self, tmp_path):
        path = tmp_path / "exp.toml"
        path.write_text('experiment = "power_sweep"\nbudgetz = [1.0]\n')
        with pytest.raises(ConfigError, match="unknown config keys"):
            load_experiment_config(path)

    def test_missing_experiment_rejected(self, tmp_path):
        path = tmp_path / "exp.toml"
        path.write_text("epochs = 5\n")
        with pytest.raises(ConfigError, match="experiment"):
            load_experiment_config(path)

    def test_bad_toml_is_config_error(self, tmp_path):
        path = tmp_path / "exp.toml"
        path.write_text("experiment = [unterminated\n")
        with pytest.raises(ConfigError, match="parse error"):
            load_experiment_config(path)

    def test_relative_corpus_path_resolves_against_config(self, tmp_path):
        save_corpus(synth_corpus(1, 2, seed=0), tmp_path / "c.json")
        path = tmp_path / "exp.toml"
        path.write_text('experiment = "power_sweep"\ncorpus_path = "c.json"\n'
                        "budgets_w = [1.0, 2.0]\n")
        config = load_experiment_config(path)
        assert config.corpus_path == str(tmp_path / "c.json")
        assert corpus_for(config).records[0].n == 2

    def test_validation(self):
        with pytest.raises(ConfigError):
            tiny_config(experiment="nope")
        with pytest.raises(ConfigError):
            tiny_config(schemes=("equal", "magic"))
        with pytest.raises(ConfigError):
            tiny_config(budgets_w=())
        with pytest.raises(ConfigError):
            tiny_config(budgets_w=(0.0, 1.0))


class TestChannelFor:
    def test_gains_fixed_per_seed(self):
        config = tiny_config()
        a = channel_for(config, 3)
        b = channel_for(config, 3)
        np.testing.assert_array_equal(a.pathloss_gain, b.pathloss_gain)
        c = channel_for(config, 4)
        assert not np.allclose(a.pathloss_gain, c.pathloss_gain)


class TestRunPowerSweep:
    def test_static_schemes_fast_path(self):
        result = run_power_sweep(tiny_config())
        assert result.kind == "power_sweep"
        # 1 seed x 2 budgets x 2 schemes
        assert len(result.rows) == 4
        assert all(r.epoch == 0 and r.t is None for r in result.rows)

    def test_quality_non_decreasing_in_budget(self):
        result = run_power_sweep(tiny_config(budgets_w=(200.0, 400.0, 800.0)))
        for scheme in ("equal", "importance"):
            vals = [r.mean_quality for r in sorted(
                (r for r in result.rows if r.scheme == scheme),
                key=lambda r: r.budget_w)]
            assert np.all(np.diff(vals) >= -1e-12)

    def test_needs_two_budgets(self):
        with pytest.raises(ConfigError):
            run_power_sweep(tiny_config(budgets_w=(300.0,)))

    def test_trained_schemes_row_shape(self):
        config = tiny_config(schemes=("equal", "diffusion", "pg"), epochs=4)
        result = run_power_sweep(config)
        # per budget: 1 equal + 1 diffusion (T=2) + 1 pg
        assert len(result.rows) == 6
        dif = [r for r in result.rows if r.scheme == "diffusion"]
        assert all(r.t == 2 and r.epoch == 3 for r in dif)

    def test_parallel_jobs_match_serial(self):
        config = tiny_config()
        serial = run_power_sweep(config, jobs=1)
        parallel = run_power_sweep(config, jobs=2)
        assert serial.rows == parallel.rows


class TestRunConvergence:
    def test_rows_per_epoch(self):
        config = tiny_config(experiment="convergence", budgets_w=(400.0,),
                             schemes=("diffusion", "pg"), t_list=(2, 3), epochs=5)
        result = run_convergence(config)
        dif = [r for r in result.rows if r.scheme == "diffusion"]
        pg = [r for r in result.rows if r.scheme == "pg"]
        assert len(dif) == 2 * 5  # two T values x epochs
        assert len(pg) == 5
        assert sorted({r.epoch for r in dif}) == list(range(5))

    def test_two_seeds_double_rows(self):
        config = tiny_config(experiment="convergence", budgets_w=(400.0,),
                             schemes=("diffusion",), t_list=(2,), epochs=3,
                             seeds=(0, 1))
        result = run_convergence(config)
        assert len(result.rows) == 2 * 3

    def test_requires_trained_scheme(self):
        with pytest.raises(ConfigError):
            run_convergence(tiny_config(experiment="convergence",
                                        budgets_w=(400.0,), schemes=("equal",)))

    def test_requires_single_budget(self):
        with pytest.raises(ConfigError):
            run_convergence(tiny_config(experiment="convergence",
                                        schemes=("diffusion",)))


class TestRunBudgetConvergence:
    def test_curves_and_report(self):
        config = tiny_config(experiment="budget_convergence",
                             schemes=("diffusion",), epochs=5)
        result = run_budget_convergence(config)
        assert len(result.rows) == 2 * 5  # two budgets x epochs
        report = convergence_report(result)
        assert set(report) == {("diffusion", 2, 300.0, 0), ("diffusion", 2, 600.0, 0)}
        assert all(0 <= ep < 5 for ep in report.values())

    def test_deterministic_report(self):
        config = tiny_config(experiment="budget_convergence",
                             schemes=("diffusion",), epochs=5)
        a = convergence_report(run_budget_convergence(config))
        b = convergence_report(run_budget_convergence(config))
        assert a == b

    def test_requires_diffusion(self):
        with pytest.raises(ConfigError):
            run_budget_convergence(tiny_config(experiment="budget_convergence",
                                               schemes=("equal",)))


class TestConvergenceEpoch:
    def test_first_epoch_within_margin(self):
        curve = [0.0, 5.0, 9.85, 10.0] + [10.0] * 30
        assert convergence_epoch(curve) == 2  # 9.85 is within 2% of 10

    def test_flat_curve_converges_at_zero(self):
        assert convergence_epoch([3.0, 3.0, 3.0]) == 0

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            convergence_epoch([])


class TestEmitOutputs:
    def test_header_exact(self, tmp_path):
        emit_outputs(SweepResult("power_sweep", []), tmp_path)
        text = (tmp_path / "results.csv").read_text()
        assert text == CSV_HEADER + "\n"

    def test_empty_result_no_svg(self, tmp_path):
        paths = emit_outputs(SweepResult("power_sweep", []), tmp_path)
        assert [p.name for p in paths] == ["results.csv"]

    def test_rows_and_polylines(self, tmp_path):
        result = run_power_sweep(tiny_config())
        paths = emit_outputs(result, tmp_path)
        lines = (tmp_path / "results.csv").read_text().splitlines()
        assert len(lines) == 1 + len(result.rows)
        svg = (tmp_path / "power_sweep.svg").read_text()
        assert svg.count("<polyline") == 2  # one per scheme

    def test_reemit_byte_identical(self, tmp_path):
        result = run_power_sweep(tiny_config())
        emit_outputs(result, tmp_path)
        first = (tmp_path / "results.csv").read_bytes()
        emit_outputs(result, tmp_path)
        assert (tmp_path / "results.csv").read_bytes() == first

    def test_row_count_is_cartesian_size(self, tmp_path):
        config = tiny_config(budgets_w=(100.0, 200.0, 300.0), seeds=(0, 1, 2))
        result = run_power_sweep(config)
        assert len(result.rows) == 3 * 3 * 2  # budgets x seeds x schemes


class TestResolveOutDir:
    def test_flag_beats_env_beats_config(self, monkeypatch, tmp_path):
        config = tiny_config(out_dir="from_config")
        monkeypatch.delenv("SEMRA_OUT_DIR", raising=False)
        assert str(resolve_out_dir(config, None)) == "from_config"
        monkeypatch.setenv("SEMRA_OUT_DIR", "from_env")
        assert str(resolve_out_dir(config, None)) == "from_env"
        assert str(resolve_out_dir(config, "from_flag")) == "from_flag"


class TestQualityBound:
    def test_emitted_qualities_within_corpus_bound(self):
        from semra.quality import quality_upper_bound
        config = tiny_config()
        result = run_power_sweep(config)
        bound = max(quality_upper_bound(r) for r in corpus_for(config).records)
        assert all(-1e-9 <= row.mean_quality <= bound + 1e-9 for row in result.rows)
