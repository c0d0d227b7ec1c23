"""Experiment harness: config validation, record schemas, closed-form
columns, CSV determinism across worker counts, and check wiring."""

import io
import math

import pytest

from modgraph.experiments import (EXPERIMENTS, EpsOutOfRangeError,
                                  ExperimentConfig, run_experiment,
                                  wilson_upper)


def cfg(**over):
    base = {"experiment": "sparse", "grid": {"n": [500], "np": [0.5]},
            "replicates": 2, "base_seed": 5}
    base.update(over)
    return ExperimentConfig.from_dict(base)


class TestConfig:
    def test_unknown_experiment(self):
        with pytest.raises(ValueError, match="unknown experiment"):
            cfg(experiment="nope")

    def test_empty_grid(self):
        with pytest.raises(ValueError, match="non-empty list"):
            cfg(grid={"n": [500], "np": []})

    def test_replicates_positive(self):
        with pytest.raises(ValueError):
            cfg(replicates=0)

    def test_unknown_key(self):
        with pytest.raises(ValueError, match="unknown config keys"):
            ExperimentConfig.from_dict({"experiment": "sparse",
                                        "grid": {"n": [5], "np": [0.5]},
                                        "bogus": 1})

    def test_eps_range(self):
        with pytest.raises(EpsOutOfRangeError):
            cfg(experiment="threshold-window", grid={"n": [100], "eps": [1.5]})

    def test_sparse_rejects_np_zero(self):
        with pytest.raises(ValueError, match="np must be positive"):
            cfg(grid={"n": [100], "np": [0.0]})

    def test_concentration_cap(self):
        from modgraph.spectral import TooLargeError
        with pytest.raises(TooLargeError, match="oracle cap"):
            cfg(experiment="concentration", grid={"n": [20], "m": [10]})

    def test_planted_rates_validated(self):
        with pytest.raises(ValueError, match="negative rates"):
            cfg(experiment="planted", grid={"n": [100], "c": [0.5], "k": [6]})

    def test_witness_assertion_needs_witness_option(self):
        with pytest.raises(ValueError, match="needs options.upper_witness"):
            cfg(experiment="growth-rate", grid={"n": [100], "np": [4.0]},
                assertions={"witness_bound": {"bound_factor": 6.0}})

    def test_grid_points_cartesian(self):
        c = cfg(experiment="growth-rate",
                grid={"n": [10, 20], "np": [2.0, 4.0]})
        pts = c.points()
        assert pts == [{"n": 10, "np": 2.0}, {"n": 10, "np": 4.0},
                       {"n": 20, "np": 2.0}, {"n": 20, "np": 4.0}]


class TestDeterminism:
    def _csv(self, config, threads=1):
        res = run_experiment(config, threads=threads)
        buf = io.StringIO()
        res.write_csv(buf)
        return buf.getvalue()

    def test_byte_identical_across_runs_and_workers(self):
        c = cfg(experiment="growth-rate", grid={"n": [600], "np": [8.0, 16.0]},
                replicates=3, base_seed=17)
        first = self._csv(c)
        assert first == self._csv(c)
        assert first == self._csv(c, threads=2)

    def test_walltime_not_in_csv(self):
        c = cfg()
        res = run_experiment(c)
        assert all("walltime" not in col for col in res.columns)
        assert "walltime_ms" in res.records[0]  # in-memory only


class TestGrowthRate:
    def test_single_point_skips_fit(self):
        c = cfg(experiment="growth-rate", grid={"n": [600], "np": [8.0]},
                replicates=3, base_seed=2)
        res = run_experiment(c)
        assert res.summary["slope"] is None
        assert len(res.records) == 3

    def test_slope_near_minus_half(self):
        c = cfg(experiment="growth-rate",
                grid={"n": [4000], "np": [16.0, 64.0, 256.0]},
                replicates=3, base_seed=3,
                assertions={"slope_range": [-0.65, -0.35],
                            "min_median_factor": 0.12})
        res = run_experiment(c)
        assert res.passed, [c for c in res.checks if not c.passed]

    def test_n_doubling_changes_median_little(self):
        c = cfg(experiment="growth-rate",
                grid={"n": [10_000, 20_000], "np": [64.0]},
                replicates=6, base_seed=4)
        res = run_experiment(c)
        meds = {row["n"]: row["median_q_swap"] for row in res.summary["medians"]}
        assert abs(meds[20_000] - meds[10_000]) < 0.1 * meds[10_000]

    def test_upper_witness_columns(self):
        c = cfg(experiment="growth-rate", grid={"n": [800], "np": [32.0]},
                replicates=2, base_seed=5,
                options={"upper_witness": True, "solver": "extremal"},
                assertions={"witness_bound": {"bound_factor": 6.0,
                                              "min_fraction": 0.9}})
        res = run_experiment(c)
        assert "upper_witness" in res.columns
        assert res.passed, res.checks
        for rec in res.records:
            assert rec["q_swap"] <= rec["upper_witness"] + 1e-8


class TestSparse:
    def test_gnp_mode(self):
        c = cfg(grid={"n": [20_000], "np": [0.5]}, replicates=3,
                assertions={"min_qcc": 0.999, "fraction": 1.0,
                            "matching_consistent": True})
        res = run_experiment(c)
        assert res.passed
        assert all(r["q_cc"] > 0.999 for r in res.records)

    def test_gnm_mode_matching_flag(self):
        c = cfg(grid={"n": [10_000], "m": [50]}, replicates=10, base_seed=11,
                assertions={"matching_consistent": True})
        res = run_experiment(c)
        assert res.passed
        flags = [r["is_matching"] for r in res.records]
        assert any(flags)  # at m=50, n=1e4 most draws are matchings
        for r in res.records:
            if r["is_matching"]:
                assert r["q_cc"] == pytest.approx(1 - 1 / 50, abs=1e-12)
                assert r["q_matching_theory"] == pytest.approx(1 - 1 / 50, abs=1e-15)
            else:
                assert r["q_matching_theory"] is None

    def test_deficit_prediction_blank_when_supercritical(self):
        c = cfg(grid={"n": [200], "np": [3.0]}, replicates=2, base_seed=13)
        res = run_experiment(c)
        for r in res.records:
            assert r["deficit_prediction"] is None


class TestThresholdWindow:
    def test_closed_form_bounds(self):
        c = cfg(experiment="threshold-window",
                grid={"n": [50_000], "eps": [0.25]}, replicates=2, base_seed=19)
        res = run_experiment(c)
        rec = res.records[0]
        assert rec["lower_bound"] == pytest.approx(1 - 0.4096, abs=1e-12)
        assert rec["upper_bound"] == pytest.approx(
            1 - 0.4096 * (1 - 0.5), abs=1e-12)
        # dual-root prediction column present and sane
        assert 0.0 < rec["eq21_value"] < 1.0
        assert 0.75 < rec["x_dual"] < 0.875

    def test_eps_tiny_bounds_near_one(self):
        # the sandwich width shrinks like 16 eps^2, so at eps = 1e-3 both
        # bounds sit within 1.6e-5 of 1
        exp = EXPERIMENTS["threshold-window"]
        lo, hi = exp.bounds(1e-3)
        assert abs(lo - 1.0) < 2e-5 and abs(hi - 1.0) < 2e-5


class TestPlanted:
    def test_k2_score_and_contiguity(self):
        c = cfg(experiment="planted", grid={"n": [30_000], "c": [4.0], "k": [2]},
                replicates=4, base_seed=23,
                assertions={"mean_tolerance": 0.015})
        res = run_experiment(c)
        assert res.passed, res.checks
        rec = res.records[0]
        assert rec["alpha"] == pytest.approx(6.0) and rec["beta"] == pytest.approx(2.0)
        assert rec["contiguity_ok"]  # boundary case counts as contiguous

    def test_k6_rates_and_floor(self):
        c = cfg(experiment="planted", grid={"n": [30_000], "c": [9.0], "k": [6]},
                replicates=4, base_seed=29,
                assertions={"mean_tolerance": 0.02})
        res = run_experiment(c)
        assert res.passed, res.checks
        rec = res.records[0]
        x = 0.999 * math.sqrt(2 * 5 * math.log(5))
        assert rec["alpha"] == pytest.approx(9 + 3 * x, rel=1e-12)
        assert rec["beta"] == pytest.approx(9 - 3 * x / 5, rel=1e-12)
        assert rec["contiguity_ok"]
        assert rec["f_over_sqrt_c"] == pytest.approx(0.6686 / 3, abs=5e-5)


class TestSbmDistinguish:
    def test_separates_well_past_threshold(self):
        c = cfg(experiment="sbm-distinguish",
                grid={"n": [20_000], "alpha": [120.0], "beta": [8.0]},
                replicates=4, base_seed=31,
                assertions={"min_separation_rate": 0.9})
        res = run_experiment(c)
        assert res.passed, res.checks
        assert res.records[0]["snr"] == pytest.approx(98.0)
        assert res.records[0]["detectability_threshold"] == 2.0

    def test_identical_models_never_separate(self):
        c = cfg(experiment="sbm-distinguish",
                grid={"n": [10_000], "alpha": [64.0], "beta": [64.0]},
                replicates=4, base_seed=37)
        res = run_experiment(c)
        assert res.summary["separation_rate"][0]["rate"] == 0.0
        assert all(abs(r["planted_score"]) < 0.01 for r in res.records)


class TestConcentration:
    def test_tails_under_bound(self):
        c = cfg(experiment="concentration", grid={"n": [8], "m": [10]},
                replicates=300, base_seed=41,
                options={"t_values": [0.0, 0.2, 0.4, 0.6, 1.0]},
                assertions={"tails_ok": True})
        res = run_experiment(c)
        assert res.passed
        rows = {row["t"]: row for row in res.summary["tails"]}
        assert rows[0.0]["bound"] == pytest.approx(2.0)  # trivially satisfied
        assert rows[1.0]["empirical_tail"] == 0.0        # q* lives in [0, 1)

    def test_wilson_upper(self):
        assert wilson_upper(0, 100) < 0.09
        assert wilson_upper(50, 100) == pytest.approx(0.64, abs=0.02)
        assert wilson_upper(0, 0) == 1.0


class TestIsolatedEdges:
    def test_ratio_and_lemma(self):
        c = cfg(experiment="isolated-edges", grid={"n": [30_000], "c": [2.0]},
                replicates=4, base_seed=43,
                assertions={"floor_all_ok": True, "ratio_band": 0.2})
        res = run_experiment(c)
        assert res.passed, res.checks
        rec = res.records[0]
        # emitted closed-form column is the whp lower-bound constant
        assert rec["prediction"] == pytest.approx(0.5 * math.exp(-4.0), rel=1e-12)
        # the observed ratio sits near the first-moment value exp(-2c)
        mean_ratio = res.summary["ratios"][0]["mean_ratio"]
        assert mean_ratio == pytest.approx(math.exp(-4.0), rel=0.2)

    def test_matching_case_lemma_truncates(self):
        # a pure matching has X = m and q_C = 1 - 1/m >= 1/2 = min(X/m, 1/2)
        c = cfg(experiment="isolated-edges", grid={"n": [4000], "c": [0.02]},
                replicates=6, base_seed=47,
                assertions={"floor_all_ok": True})
        res = run_experiment(c)
        assert res.passed
        assert any(r["ratio"] == 1.0 for r in res.records
                   if r["ratio"] is not None)


class TestCsvFormat:
    def test_twelve_significant_digits(self):
        c = cfg(grid={"n": [300], "np": [0.8]}, replicates=1, base_seed=53)
        res = run_experiment(c)
        buf = io.StringIO()
        res.write_csv(buf)
        lines = buf.getvalue().splitlines()
        assert lines[0].startswith("n,np,seed,m,q_cc")
        qcc_col = lines[0].split(",").index("q_cc")
        printed = lines[1].split(",")[qcc_col]
        assert printed == "%.12g" % res.records[0]["q_cc"]


class TestPlantedContiguityWarning:
    def test_overdriven_rates_warn(self):
        c = cfg(experiment="planted", grid={"n": [500], "c": [9.0], "k": [6]},
                replicates=1, base_seed=59, options={"x_factor": 1.2})
        with pytest.warns(RuntimeWarning, match="contiguity"):
            res = run_experiment(c)
        assert res.records[0]["contiguity_ok"] is False

    def test_default_rates_do_not_warn(self):
        import warnings as _w
        c = cfg(experiment="planted", grid={"n": [500], "c": [9.0], "k": [6]},
                replicates=1, base_seed=59)
        with _w.catch_warnings():
            _w.simplefilter("error", RuntimeWarning)
            res = run_experiment(c)
        assert res.records[0]["contiguity_ok"] is True
