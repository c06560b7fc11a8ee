import dataclasses
import json

import pytest

from slelab.harness import ExperimentConfig, config_hash, resume, run_experiment


def hit_cfg(**kw):
    base = dict(
        kappa=8.0 / 3.0,
        kind="hit-prob",
        points=((0.0, 1.0),),
        radii=(0.5,),
        n_samples=64,
        seed=3,
        engine="flow",
    )
    base.update(kw)
    return ExperimentConfig(**base)


class TestConfig:
    def test_hash_stable_and_sensitive(self):
        a = hit_cfg()
        b = hit_cfg()
        c = hit_cfg(seed=4)
        assert config_hash(a) == config_hash(b)
        assert config_hash(a) != config_hash(c)

    def test_json_roundtrip(self):
        a = hit_cfg()
        b = ExperimentConfig.from_json(a.canonical())
        assert a == b

    def test_validation(self):
        with pytest.raises(ValueError):
            ExperimentConfig(kappa=9.0, kind="hit-prob", points=((0, 1),), radii=(0.1,))
        with pytest.raises(ValueError):
            ExperimentConfig(kappa=2.0, kind="nope")
        with pytest.raises(ValueError):
            ExperimentConfig(kappa=2.0, kind="hit-prob")  # no points
        with pytest.raises(ValueError):
            ExperimentConfig(kappa=2.0, kind="mink-moments", radii=(0.1,))

    def test_resolution_floor_fails_before_simulation(self):
        cfg = hit_cfg(c_res=16.0)
        with pytest.raises(RuntimeError, match="resolution floor"):
            run_experiment(cfg, "/tmp/slelab-floor-test")


class TestRunExperiment:
    def test_smoke_run_writes_artifacts(self, tmp_path):
        cfg = hit_cfg(n_samples=10)
        manifest = run_experiment(cfg, tmp_path)
        assert (tmp_path / "config.json").exists()
        assert (tmp_path / "manifest.json").exists()
        assert (tmp_path / "results.csv").exists()
        rows = manifest["results"]
        assert rows[0]["estimand"] == "hit_prob"
        assert rows[0]["n"] == 10
        stored = json.loads((tmp_path / "manifest.json").read_text())
        assert stored["digest"] == cfg.digest
        assert stored["rng"] == "philox4x64-10"

    def test_determinism_byte_identical(self, tmp_path):
        cfg = hit_cfg()
        run_experiment(cfg, tmp_path / "a")
        run_experiment(cfg, tmp_path / "b")
        assert (tmp_path / "a" / "results.csv").read_bytes() == (
            tmp_path / "b" / "results.csv"
        ).read_bytes()

    def test_worker_count_invariance(self, tmp_path):
        a = run_experiment(hit_cfg(n_samples=200, workers=1), tmp_path / "w1")
        b = run_experiment(hit_cfg(n_samples=200, workers=2), tmp_path / "w2")
        ea = [r for r in a["results"] if r["estimand"] == "hit_prob"][0]
        eb = [r for r in b["results"] if r["estimand"] == "hit_prob"][0]
        assert ea["mean"] == eb["mean"] and ea["stderr"] == eb["stderr"]

    def test_exponent_kind(self, tmp_path):
        cfg = ExperimentConfig(
            kappa=8.0 / 3.0,
            kind="exponent",
            points=((0.0, 1.0),),
            radii=(0.8, 0.6, 0.45),
            n_samples=120,
            seed=9,
            engine="flow",
        )
        manifest = run_experiment(cfg, tmp_path)
        names = [r["estimand"] for r in manifest["results"]]
        assert "slope" in names and "slope_stderr" in names

    def test_integral_kind(self, tmp_path):
        cfg = ExperimentConfig(
            kappa=8.0 / 3.0,
            kind="integral",
            domain=(-1.0, 1.0, 0.0, 1.0),
            n_samples=1,
            mc_points=20_000,
            n_points=2,
            seed=1,
        )
        manifest = run_experiment(cfg, tmp_path)
        assert manifest["results"][0]["mean"] > 0

    def test_bound_check_kind(self, tmp_path):
        cfg = ExperimentConfig(
            kappa=8.0 / 3.0,
            kind="bound-check",
            points=((0.0, 1.0), (0.0, 2.0)),
            radii=(0.4, 0.4),
            n_samples=40,
            seed=2,
            engine="flow",
        )
        manifest = run_experiment(cfg, tmp_path)
        names = [r["estimand"] for r in manifest["results"]]
        assert "family_bound_product" in names and "hit_over_bound" in names


class TestResume:
    def test_resume_equals_fresh_run(self, tmp_path):
        cfg = hit_cfg(n_samples=50)
        run_experiment(cfg, tmp_path / "part")
        resumed = resume(tmp_path / "part" / "manifest.json", 120, tmp_path / "part")
        fresh = run_experiment(hit_cfg(n_samples=120), tmp_path / "full")
        row_r = [r for r in resumed["results"] if r["estimand"] == "hit_prob"][0]
        row_f = [r for r in fresh["results"] if r["estimand"] == "hit_prob"][0]
        assert row_r["mean"] == row_f["mean"]
        assert row_r["stderr"] == row_f["stderr"]
        assert (tmp_path / "part" / "results.csv").read_bytes() == (
            tmp_path / "full" / "results.csv"
        ).read_bytes()

    def test_resume_rejects_tampered_manifest(self, tmp_path):
        cfg = hit_cfg(n_samples=30)
        run_experiment(cfg, tmp_path)
        m = json.loads((tmp_path / "manifest.json").read_text())
        m["config"]["seed"] = 999
        (tmp_path / "manifest.json").write_text(json.dumps(m))
        with pytest.raises(ValueError, match="hash mismatch"):
            resume(tmp_path / "manifest.json", 60)

    def test_resume_noop_when_done(self, tmp_path):
        cfg = hit_cfg(n_samples=30)
        run_experiment(cfg, tmp_path)
        out = resume(tmp_path / "manifest.json", 30)
        assert out["n_samples_done"] == 30
