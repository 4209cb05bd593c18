import json
from pathlib import Path

import numpy as np
import pytest

from allencahn.fermi import PathRecord
from allencahn.harness import (
    ConfigError,
    ExperimentConfig,
    compare_path_laws,
    ensemble_to_path_records,
    noise_audit,
    ordered_pairs_worst_violation,
    reaction_from_spec,
    run_experiment,
    run_spde_ensemble,
    sde_path_records,
)
from allencahn.numerics import RngStream
from allencahn.sde import SdeCoefficients, euler_maruyama
from allencahn.spde import default_bump, make_initial_data


def _records(times, matrix):
    return sde_path_records(np.asarray(times, float), np.asarray(matrix, float))


class TestConfig:
    def test_empty_eps_rejected(self):
        cfg = ExperimentConfig(kind="coefficients", eps_list=[])
        with pytest.raises(ConfigError, match="eps_list"):
            cfg.validate()

    def test_unknown_kind(self):
        with pytest.raises(ConfigError, match="unknown experiment"):
            ExperimentConfig(kind="nope").validate()

    def test_fail_fast_no_artifacts(self, tmp_path):
        out = tmp_path / "exp"
        cfg = ExperimentConfig(kind="noise-audit", eps_list=[], out_dir=str(out))
        with pytest.raises(ConfigError):
            run_experiment(cfg)
        assert not out.exists()

    def test_from_file_with_overrides(self, tmp_path):
        p = tmp_path / "cfg.json"
        p.write_text(json.dumps({"kind": "coefficients", "seed": 1}))
        cfg = ExperimentConfig.from_file(p, seed=7, out_dir=str(tmp_path / "o"))
        assert cfg.seed == 7 and cfg.kind == "coefficients"

    def test_reaction_spec_round_trip(self):
        r = reaction_from_spec({"kind": "builtin-cubic", "c0": 1.0})
        assert r.kind == "builtin-cubic"
        r2 = reaction_from_spec({"kind": "shifted",
                                 "base": {"kind": "builtin-cubic"}, "delta": 0.05, "sign": 1})
        assert r2(1.05) == pytest.approx(0.0, abs=1e-12)
        u = np.linspace(-2, 2, 41)
        r3 = reaction_from_spec({"kind": "tabulated", "u": list(u), "f": list(u - u**3)})
        assert r3(0.5) == pytest.approx(0.375, abs=1e-6)


class TestComparePathLaws:
    def test_identical_ensembles(self):
        rng = np.random.default_rng(0)
        xs = rng.normal(size=(100, 4))
        times = [0.1, 0.2, 0.3, 0.4]
        stats = compare_path_laws(_records(times, xs), _records(times, xs))
        assert all(row["ks_stat"] == 0.0 for row in stats.rows)
        assert stats.verdict

    def test_null_calibration_same_law(self):
        coeffs = SdeCoefficients(1.0, 0.5, 0.0)
        b = default_bump(0.5)
        t1, x1 = euler_maruyama(coeffs, b, 0.0, 0.3, 1e-3, 1000, RngStream(100), record_stride=50)
        t2, x2 = euler_maruyama(coeffs, b, 0.0, 0.3, 1e-3, 1000, RngStream(200), record_stride=50)
        stats = compare_path_laws(_records(t1[1:], x1[:, 1:]), _records(t2[1:], x2[:, 1:]))
        assert stats.fraction_above >= 0.95

    def test_shifted_ensemble_rejected(self):
        rng = np.random.default_rng(1)
        xs = rng.normal(size=(200, 5))
        times = np.linspace(0.1, 0.5, 5)
        stats = compare_path_laws(_records(times, xs), _records(times, xs + 1.0))
        assert stats.fraction_above == 0.0
        assert not stats.verdict

    def test_mismatched_lattice_rejected(self):
        xs = np.zeros((60, 3))
        with pytest.raises(ValueError, match="lattice"):
            compare_path_laws(_records([0.1, 0.2, 0.3], xs), _records([0.1, 0.2, 0.4], xs))

    def test_small_slices_not_counted(self):
        xs = np.random.default_rng(2).normal(size=(10, 3))
        stats = compare_path_laws(_records([1, 2, 3], xs), _records([1, 2, 3], xs),
                                  min_samples=50)
        assert all(np.isnan(row["ks_stat"]) for row in stats.rows)


class TestNoiseAudit:
    def test_zero_amplitude(self):
        cfg = ExperimentConfig(kind="noise-audit", eps_list=[0.05], n_paths=4,
                               amplitude=0.0, threads=1)
        rep = noise_audit(cfg, t_end=0.05)
        assert rep["eps"]["0.05"]["sup_raw_mean"] == 0.0

    def test_gamma_scaling_exact(self):
        # the audited equation is linear in the amplitude factor
        base = dict(kind="noise-audit", eps_list=[0.05], n_paths=6, threads=1, seed=42)
        r1 = noise_audit(ExperimentConfig(gamma=1.0, **base), t_end=0.05)
        r2 = noise_audit(ExperimentConfig(gamma=2.0, **base), t_end=0.05)
        s1 = r1["eps"]["0.05"]["sup_raw_mean"]
        s2 = r2["eps"]["0.05"]["sup_raw_mean"]
        assert s2 / s1 == pytest.approx(0.05, rel=1e-9)


class TestStochasticComparison:
    def test_small_ordered_ensemble(self, fine_profile):
        eps = 0.05
        cfg = ExperimentConfig(kind="spde-vs-sde", eps_list=[eps], gamma=1.0,
                               n_paths=10, seed=3, threads=1)
        g = cfg.grid(eps)
        rng = np.random.default_rng(8)
        pairs = []
        for _ in range(10):
            lo = make_initial_data("general", {"xi0": 0.0}, g, eps)
            bump = 0.3 * rng.uniform(0.2, 1.0) * np.exp(
                -((g.x - rng.uniform(-1, 1)) ** 2) / 0.2
            )
            hi = lo.copy()
            hi.values = np.minimum(hi.values + bump, 1.0 + 1e-9)
            pairs.append((lo, hi))
        worst = ordered_pairs_worst_violation(cfg, eps, pairs, t_end=0.1)
        tol = 10 * (g.dx**2 + cfg.step_size(eps, reaction_from_spec(cfg.reaction)))
        assert np.all(worst >= -tol)


class TestExperiments:
    def test_coefficients_artifacts(self, tmp_path):
        cfg = ExperimentConfig(kind="coefficients", out_dir=str(tmp_path / "c"))
        out = run_experiment(cfg)
        summary = json.loads((out / "summary.json").read_text())
        assert summary["schema_version"] == 1
        assert summary["alpha1"] == pytest.approx(1.029884, abs=1e-4)
        assert (out / "profile.csv").exists()
        payload = json.loads((out / "coefficients.json").read_text())
        assert payload["alpha2"] == pytest.approx(2.498, abs=0.01)

    @pytest.mark.slow
    def test_tiny_spde_vs_sde_deterministic(self, tmp_path):
        common = dict(kind="spde-vs-sde", eps_list=[0.05], gamma=1.0, n_paths=60,
                      t_end_rescaled=0.06, record_stride_rescaled=0.02,
                      ks_pass_fraction=0.5, half_width=4.0, threads=2, seed=77)
        out1 = run_experiment(ExperimentConfig(out_dir=str(tmp_path / "a"), **common))
        out2 = run_experiment(ExperimentConfig(out_dir=str(tmp_path / "b"), **common))
        f1 = (out1 / "spde_paths_eps0p05.csv").read_bytes()
        f2 = (out2 / "spde_paths_eps0p05.csv").read_bytes()
        assert f1 == f2
        summary = json.loads((out1 / "summary.json").read_text())
        per = summary["per_eps"]["0.05"]
        assert per["paths_failed"] + per["paths_completed"] == 60

    def test_chunking_invariance(self, fine_profile):
        cfg1 = ExperimentConfig(kind="spde-vs-sde", eps_list=[0.05], n_paths=6,
                                threads=1, seed=13, half_width=4.0)
        cfg2 = ExperimentConfig(kind="spde-vs-sde", eps_list=[0.05], n_paths=6,
                                threads=3, seed=13, half_width=4.0)
        lattice = np.array([0.01, 0.02])
        e1 = run_spde_ensemble(cfg1, 0.05, "profile-on-manifold", {"eta": 0.0},
                               fine_profile, lattice)
        e2 = run_spde_ensemble(cfg2, 0.05, "profile-on-manifold", {"eta": 0.0},
                               fine_profile, lattice)
        assert np.allclose(e1["positions"], e2["positions"], atol=1e-12, equal_nan=True)
