import math

import numpy as np
import pytest

from esslab import NoMassUnderHError, WeightedSampleSet, ess_report, identity
from esslab.cli import main
from esslab.experiments import (
    ExperimentConfig,
    default_config,
    diagnose,
    grid_values,
    parse_integrand,
    run_mean_mismatch,
    run_mis_scenario,
    run_rare_event,
    run_var_mismatch,
)


def small_config(experiment, **kw):
    base = dict(replicates=300, master_seed=99, workers=1)
    base.update(kw)
    return default_config(experiment, **base)


class TestGridValues:
    def test_inclusive_endpoint(self):
        assert grid_values(0.5, 3.5, 0.25)[-1] == 3.5
        assert len(grid_values(0.0, 3.0, 0.1)) == 31

    def test_step_must_be_positive(self):
        with pytest.raises(ValueError):
            grid_values(0.0, 1.0, 0.0)


class TestConfigValidation:
    def test_unknown_experiment(self):
        with pytest.raises(ValueError):
            ExperimentConfig("foo", (4,), (0.5,))

    def test_scenario_required_for_mis(self):
        with pytest.raises(ValueError):
            ExperimentConfig("mis-scenario", (6,), (), scenario=7)


class TestMeanMismatch:
    def test_rows_at_zero_and_large_mismatch(self):
        cfg = small_config("mean-mismatch", n_values=(64,), grid=(0.0, 2.0),
                           replicates=400)
        rows = run_mean_mismatch(cfg)
        at0, at2 = rows[0], rows[1]
        # proposal equals target: weights are exactly 1
        assert at0["ess_hat_over_n"] == 1.0
        assert abs(at0["ess_over_n"] - 1.0) < 3 * at0["se_ess_over_n"]
        assert at0["delta_chain_over_n"] == pytest.approx(1.0, abs=1e-12)
        # strong mismatch: the rule of thumb overestimates the truth
        assert at2["ratio_hat_to_true"] > 1.0

    def test_delta_chain_column_is_exp_of_minus_mu_sq(self):
        cfg = small_config("mean-mismatch", n_values=(16,), grid=(1.0,),
                           replicates=50)
        row = run_mean_mismatch(cfg)[0]
        assert row["delta_chain_over_n"] == pytest.approx(math.exp(-1.0), abs=1e-12)

    def test_normalized_ess_hat_column_in_range(self):
        cfg = small_config("mean-mismatch", n_values=(8, 32), grid=(0.0, 1.0, 3.0))
        for row in run_mean_mismatch(cfg):
            assert 1.0 / row["n"] <= row["ess_hat_over_n"] <= 1.0

    def test_ratio_at_least_one_for_all_three_n(self):
        # overestimation holds across the grid for every N, up to 3 SE slack
        cfg = small_config("mean-mismatch", n_values=(4, 16, 256),
                           grid=(0.0, 0.5, 1.5, 3.0), replicates=2000)
        for row in run_mean_mismatch(cfg):
            se_hat = row["ess_hat_std_over_n"] / math.sqrt(cfg.replicates)
            se_ratio = row["ratio_hat_to_true"] * (
                se_hat / row["ess_hat_over_n"]
                + row["se_ess_over_n"] / row["ess_over_n"]
            )
            assert row["ratio_hat_to_true"] >= 1.0 - 3.0 * se_ratio


class TestVarMismatch:
    def test_matched_variance_row(self):
        cfg = small_config("var-mismatch", n_values=(64,), grid=(1.0,),
                           replicates=400)
        row = run_var_mismatch(cfg)[0]
        assert row["ess_hat_over_n"] == 1.0
        assert abs(row["ess_over_n"] - 1.0) < 3 * row["se_ess_over_n"]
        assert row["divergent"] == 0

    def test_divergence_flag_and_blank_delta(self):
        cfg = small_config("var-mismatch", n_values=(8,), grid=(0.6, 0.7, 0.8),
                           replicates=50)
        rows = run_var_mismatch(cfg)
        assert [r["divergent"] for r in rows] == [1, 1, 0]
        assert rows[0]["delta_chain_over_n"] is None
        assert rows[1]["delta_chain_over_n"] is None
        assert rows[2]["delta_chain_over_n"] is not None

    def test_delta_chain_value_at_variance_two(self):
        cfg = small_config("var-mismatch", n_values=(8,), grid=(math.sqrt(2.0),),
                           replicates=50)
        row = run_var_mismatch(cfg)[0]
        var_w = 2.0 / math.sqrt(3.0) - 1.0
        assert row["delta_chain_over_n"] == pytest.approx(1.0 / (1.0 + var_w), rel=1e-12)


class TestRareEvent:
    def test_ess_hat_pinned_at_n_and_error_grows(self):
        cfg = small_config("rare-event", n_values=(500,), grid=(0.5, 1.0, 2.0, 3.0),
                           replicates=400)
        rows = run_rare_event(cfg)
        for row in rows:
            assert row["ess_hat_over_n"] == 1.0
        rr = [row["rrmse"] for row in rows]
        assert rr[1] < rr[3]  # rrmse at alpha=3 above rrmse at alpha=1
        assert rows[0]["true_value"] == pytest.approx(
            math.erfc(0.5 / math.sqrt(2)), rel=1e-15)

    def test_analytic_variance_is_non_monotone_in_alpha(self):
        cfg = small_config("rare-event", n_values=(500,),
                           grid=grid_values(0.5, 3.5, 0.25), replicates=50)
        va = [row["var_analytic"] for row in run_rare_event(cfg)]
        assert max(va) > va[0]  # rises first (p crosses 1/2 near 0.67)
        assert va[-1] < va[0]   # then decays as the event gets rare


class TestMisScenario:
    def test_scenario1_schemes(self):
        cfg = small_config("mis-scenario", n_values=(96,), scenario=1,
                           replicates=800)
        rows = {r["scheme"]: r for r in run_mis_scenario(cfg)}
        # deterministic-mixture weights are exactly 1: the rule of thumb is blind
        assert rows["N3"]["ess_hat_over_n"] == 1.0
        assert rows["R3"]["ess_hat_over_n"] == 1.0
        # R3 is direct target sampling; N3 samples with variance reduction
        assert abs(rows["R3"]["ess_over_n"] - 1.0) < 3 * rows["R3"]["se_ess_over_n"]
        assert rows["N3"]["ess_over_n"] > 2.0

    def test_scenario_parameter_changes_rows(self):
        cfg1 = small_config("mis-scenario", n_values=(24,), scenario=1, replicates=200)
        cfg2 = small_config("mis-scenario", n_values=(24,), scenario=2, replicates=200)
        r1 = run_mis_scenario(cfg1)
        r2 = run_mis_scenario(cfg2)
        assert r1 != r2


class TestCsvOutput:
    def test_bit_identical_across_runs_and_worker_counts(self, tmp_path):
        out1, out2, out3 = (tmp_path / f"{i}.csv" for i in range(3))
        for out, workers in ((out1, 1), (out2, 1), (out3, 2)):
            cfg = small_config("mean-mismatch", n_values=(16,), grid=(0.0, 0.5),
                               replicates=120, out=out, workers=workers)
            run_mean_mismatch(cfg)
        assert out1.read_bytes() == out2.read_bytes() == out3.read_bytes()

    def test_comment_header_echoes_config(self, tmp_path):
        out = tmp_path / "m.csv"
        cfg = small_config("mis-scenario", n_values=(12,), scenario=2,
                           replicates=60, out=out)
        run_mis_scenario(cfg)
        lines = out.read_text(encoding="utf-8").splitlines()
        comments = [l for l in lines if l.startswith("# ")]
        assert "# experiment=mis-scenario" in comments
        assert "# scenario=2" in comments
        assert "# replicates=60" in comments
        header = next(l for l in lines if not l.startswith("#"))
        assert header.startswith("scheme,n,")
        assert any(l.startswith("N1,") for l in lines)


class TestDiagnose:
    def test_uniform_weights(self, tmp_path):
        path = tmp_path / "in.csv"
        path.write_text("x,log_w\n" + "".join(f"{i}.0,0.0\n" for i in range(4)))
        report = diagnose(path)
        assert report.ess_hat == 4.0

    def test_single_finite_weight(self, tmp_path):
        path = tmp_path / "in.csv"
        path.write_text("x,log_w\n0.0,0.0\n1.0,-inf\n2.0,-inf\n3.0,-inf\n")
        assert diagnose(path).ess_hat == 1.0

    def test_round_trip_matches_in_process_report(self, tmp_path):
        rng = np.random.default_rng(3)
        ws = WeightedSampleSet(rng.standard_normal(50), rng.uniform(-40, 3, 50))
        path = tmp_path / "ws.csv"
        ws.to_csv(path)
        assert diagnose(path, integrand=identity) == ess_report(ws, h=identity)

    def test_no_mass_under_h_passes_through(self, tmp_path):
        path = tmp_path / "in.csv"
        path.write_text("x,log_w\n0.1,0.0\n-0.2,0.0\n")
        with pytest.raises(NoMassUnderHError):
            diagnose(path, integrand=parse_integrand("tail:5.0"))

    def test_report_csv_written(self, tmp_path):
        src = tmp_path / "in.csv"
        src.write_text("x,log_w\n0.0,0.0\n1.0,0.0\n")
        out = tmp_path / "report.csv"
        diagnose(src, out=out)
        lines = out.read_text().splitlines()
        assert lines[0] == "n,ess_hat,cv,l2,ess_hat_h"
        assert lines[1].startswith("2,2.0,")


class TestParseIntegrand:
    def test_identity(self):
        assert parse_integrand("identity") is identity

    def test_tail(self):
        h = parse_integrand("tail:1.5")
        assert h(np.array([2.0]))[0] == 1.0

    def test_unknown(self):
        with pytest.raises(ValueError):
            parse_integrand("cubic")


class TestCli:
    def test_experiment_subcommand_writes_csv(self, tmp_path, capsys):
        out = tmp_path / "rare.csv"
        code = main(["rare-event", "--n", "100", "--grid", "0.5:1.0:0.5",
                     "--replicates", "80", "--seed", "3", "--out", str(out)])
        assert code == 0
        text = out.read_text(encoding="utf-8")
        assert text.splitlines()[0] == "# experiment=rare-event"
        assert "n,alpha,true_value" in text

    def test_diagnose_subcommand_prints_report(self, tmp_path, capsys):
        src = tmp_path / "in.csv"
        src.write_text("x,log_w\n0.0,0.0\n1.0,0.0\n2.0,0.0\n")
        code = main(["diagnose", "--in", str(src)])
        assert code == 0
        printed = capsys.readouterr().out.splitlines()
        assert printed[0] == "n,ess_hat,cv,l2,ess_hat_h"
        assert printed[1].startswith("3,3.0,")

    def test_mis_scenario_flag(self, tmp_path):
        out = tmp_path / "mis.csv"
        code = main(["mis-scenario", "--n", "6,12", "--scenario", "3",
                     "--replicates", "40", "--seed", "2", "--out", str(out)])
        assert code == 0
        assert "# scenario=3" in out.read_text()
