"""Experiment orchestration: configs, manifests, CSV results, resume.

A run is fully described by an ExperimentConfig; its canonical JSON form
(defaults materialised, keys sorted, floats in repr precision) hashes to a
config digest that names the run.  Substreams are keyed by (seed, sample
index) and reductions happen in fixed chunk order, so results.csv is
byte-identical for a given (seed, config) regardless of worker count.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .core import PointConfig, derive_params, multipoint_interior_bound
from .estimators import (
    EstimateResult,
    Rect,
    content_moments,
    exponent_fit,
    hit_prob,
    integral_lk_bound,
)
from .geometry import circle_family, family_bound_product
from .loewner import RNG_ALGORITHM, SimConfig

__all__ = ["ExperimentConfig", "run_experiment", "resume", "config_hash"]

KINDS = ("hit-prob", "exponent", "mink-moments", "bound-check", "integral")


@dataclass(frozen=True)
class ExperimentConfig:
    kappa: float
    kind: str
    points: tuple = ()  # ((re, im), ...)
    radii: tuple = ()
    domain: tuple | None = None  # (x0, x1, y0, y1)
    n_samples: int = 1000
    seed: int = 0
    outdir: str = "runs"
    c_res: float = 100.0
    escape_factor: float = 8.0
    delta_blowup: float = 1e-8
    engine: str = "auto"
    eta: float = 12.0
    workers: int = 1
    grid_rule: float = 4.0
    n_max: int = 3
    mc_points: int = 100_000
    n_points: int = 1
    reproducible: bool = True

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown experiment kind {self.kind!r}")
        object.__setattr__(
            self, "points", tuple((float(a), float(b)) for a, b in self.points)
        )
        object.__setattr__(self, "radii", tuple(float(r) for r in self.radii))
        if self.domain is not None:
            object.__setattr__(
                self, "domain", tuple(float(v) for v in self.domain)
            )
        derive_params(self.kappa)  # validates kappa
        if self.kind in ("hit-prob", "exponent", "bound-check"):
            if not self.points or not self.radii:
                raise ValueError(f"{self.kind} needs points and radii")
            self.point_config()  # validates geometry
        if self.kind in ("mink-moments", "integral") and self.domain is None:
            raise ValueError(f"{self.kind} needs a domain rectangle")
        if self.n_samples < 1:
            raise ValueError("n_samples must be >= 1")

    def point_config(self) -> PointConfig:
        pts = [complex(a, b) for a, b in self.points]
        if self.kind == "exponent":
            # one marked point probed at every radius
            return PointConfig(points=pts[:1], radii=[self.radii[0]])
        return PointConfig(points=pts, radii=self.radii)

    def sim_config(self) -> SimConfig:
        return SimConfig(
            c_res=self.c_res,
            escape_factor=self.escape_factor,
            delta_blowup=self.delta_blowup,
            engine=self.engine,
            eta=self.eta,
            workers=self.workers,
        )

    def rect(self) -> Rect:
        return Rect(*self.domain)

    def canonical(self) -> str:
        d = dataclasses.asdict(self)
        return json.dumps(d, sort_keys=True, default=repr)

    @property
    def digest(self) -> str:
        return config_hash(self)

    @classmethod
    def from_json(cls, text: str) -> "ExperimentConfig":
        d = json.loads(text)
        d.pop("digest", None)
        return cls(**{k: (tuple(map(tuple, v)) if k == "points" else tuple(v))
                      if isinstance(v, list) else v for k, v in d.items()})


def config_hash(cfg: ExperimentConfig) -> str:
    return hashlib.sha256(cfg.canonical().encode()).hexdigest()[:16]


def _estimate_row(name, est: EstimateResult, digest):
    return {
        "estimand": name,
        "digest": digest,
        "mean": est.mean,
        "stderr": est.stderr,
        "n": est.n_samples,
    }


def _value_row(name, value, digest, n=0):
    return {"estimand": name, "digest": digest, "mean": value, "stderr": 0.0, "n": n}


def _compute(cfg: ExperimentConfig, sample_offset: int = 0):
    """All estimand rows for the config, plus raw accumulators for resume."""
    p = derive_params(cfg.kappa)
    sim = cfg.sim_config()
    digest = cfg.digest
    rows = []
    acc = {}
    if cfg.kind == "hit-prob":
        pc = cfg.point_config()
        est = hit_prob(pc, p, cfg.n_samples, sim, seed=cfg.seed,
                       sample_offset=sample_offset)
        rows.append(_estimate_row("hit_prob", est, digest))
        acc["hits"] = int(round(est.mean * est.n_samples))
        rows.append(
            _value_row("multipoint_interior_bound",
                       multipoint_interior_bound(pc, p), digest)
        )
    elif cfg.kind == "exponent":
        z = complex(*cfg.points[0])
        ests = []
        for j, r in enumerate(sorted(cfg.radii, reverse=True)):
            pc = PointConfig(points=[z], radii=[r])
            est = hit_prob(pc, p, cfg.n_samples, sim, seed=cfg.seed,
                           sample_offset=sample_offset + j * cfg.n_samples)
            ests.append(est)
            rows.append(_estimate_row(f"hit_prob[r={r!r}]", est, digest))
            acc[f"hits[{r!r}]"] = int(round(est.mean * est.n_samples))
        fit = exponent_fit(sorted(cfg.radii, reverse=True), ests)
        rows.append(_value_row("slope", fit.slope, digest, cfg.n_samples))
        rows.append(_value_row("slope_stderr", fit.slope_stderr, digest))
    elif cfg.kind == "mink-moments":
        cm = content_moments(
            p, cfg.rect(), cfg.radii, cfg.n_max, cfg.n_samples, sim,
            seed=cfg.seed, sample_offset=sample_offset, grid_rule=cfg.grid_rule,
        )
        for (m, r), est in sorted(cm.table.items()):
            rows.append(_estimate_row(f"content_moment[m={m},r={r!r}]", est, digest))
            acc[f"sum[{m},{r!r}]"] = est.mean * est.n_samples
            acc[f"sum2[{m},{r!r}]"] = (
                est.stderr**2 * est.n_samples + est.mean**2
            ) * est.n_samples
    elif cfg.kind == "bound-check":
        pc = cfg.point_config()
        est = hit_prob(pc, p, cfg.n_samples, sim, seed=cfg.seed,
                       sample_offset=sample_offset)
        bound = multipoint_interior_bound(pc, p)
        levels, fam = circle_family(pc)
        fprod = family_bound_product(fam, p)
        rows.append(_estimate_row("hit_prob", est, digest))
        acc["hits"] = int(round(est.mean * est.n_samples))
        rows.append(_value_row("multipoint_interior_bound", bound, digest))
        rows.append(_value_row("family_bound_product", fprod, digest))
        rows.append(
            _value_row("hit_over_bound", est.mean / bound if bound else 0.0, digest)
        )
    elif cfg.kind == "integral":
        dom = cfg.rect()
        est = integral_lk_bound(dom, cfg.n_points, cfg.mc_points, p, seed=cfg.seed)
        rows.append(_estimate_row("integral_lk_bound", est, digest))
    return rows, acc


def _write_csv(path: Path, rows) -> None:
    with open(path, "w") as fh:
        fh.write("estimand,digest,mean,stderr,n\n")
        for r in rows:
            fh.write(
                f"{r['estimand']},{r['digest']},{r['mean']!r},{r['stderr']!r},{r['n']}\n"
            )


def run_experiment(cfg: ExperimentConfig, outdir=None):
    """Run all estimands of the config; write config/manifest/results files.

    Returns the manifest dict.  Partial failures are recorded per estimand
    in the manifest and re-raised as RuntimeError after writing it.
    """
    out = Path(outdir if outdir is not None else cfg.outdir)
    out.mkdir(parents=True, exist_ok=True)
    digest = cfg.digest
    t0 = time.time()
    error = None
    rows, acc = [], {}
    try:
        rows, acc = _compute(cfg)
    except Exception as exc:  # noqa: BLE001 - recorded in the manifest
        error = f"{type(exc).__name__}: {exc}"
    manifest = {
        "artifact": "slelab",
        "version": __version__,
        "rng": RNG_ALGORITHM,
        "digest": digest,
        "config": json.loads(cfg.canonical()),
        "wall_time_s": time.time() - t0,
        "n_samples_done": 0 if error else cfg.n_samples,
        "accumulators": {k: repr(v) for k, v in acc.items()},
        "results": rows,
        "error": error,
    }
    (out / "config.json").write_text(cfg.canonical())
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, default=repr))
    if not error:
        _write_csv(out / "results.csv", rows)
    if error:
        raise RuntimeError(f"experiment failed: {error}")
    return manifest


def resume(manifest_path, n_samples: int, outdir=None):
    """Extend a hit-prob style run to n_samples without redoing old substreams.

    Only counting estimands (hit-prob, bound-check) support exact resume;
    the combined estimate equals a fresh single-pass run bit-for-bit
    because events are integer counts over disjoint substream ranges.
    """
    manifest_path = Path(manifest_path)
    old = json.loads(manifest_path.read_text())
    cfg = ExperimentConfig.from_json(json.dumps(old["config"]))
    if old["digest"] != cfg.digest:
        raise ValueError("config hash mismatch: manifest was edited")
    if cfg.kind not in ("hit-prob", "bound-check"):
        raise ValueError(f"resume not supported for kind {cfg.kind!r}")
    done = old["n_samples_done"]
    if n_samples <= done:
        return old
    extra = dataclasses.replace(cfg, n_samples=n_samples - done)
    rows_new, acc_new = _compute(extra, sample_offset=done)
    hits = int(old["accumulators"]["hits"]) + acc_new["hits"]
    p = hits / n_samples
    se = float(np.sqrt(max(p * (1 - p), 0.0) / n_samples))
    full = dataclasses.replace(cfg, n_samples=n_samples)
    digest = full.digest
    rows = [
        _estimate_row("hit_prob", EstimateResult(p, se, n_samples), digest)
    ] + [
        dict(r, digest=digest) for r in rows_new if not r["estimand"].startswith("hit_prob")
    ]
    out = Path(outdir if outdir is not None else manifest_path.parent)
    manifest = {
        "artifact": "slelab",
        "version": __version__,
        "rng": RNG_ALGORITHM,
        "digest": digest,
        "config": json.loads(full.canonical()),
        "wall_time_s": old["wall_time_s"],
        "n_samples_done": n_samples,
        "accumulators": {"hits": repr(hits)},
        "results": rows,
        "error": None,
    }
    (out / "config.json").write_text(full.canonical())
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, default=repr))
    _write_csv(out / "results.csv", rows)
    return manifest
