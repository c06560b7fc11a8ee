"""Command-line front end.

Subcommands: simulate | bound | green | hit-prob | mink | verify.
Exit codes: 0 success, 1 criterion failure (verify), 2 usage or validation
error.  All numeric output is printed with 12 significant digits; CSV uses
full round-trip precision.  No numeric logic lives here: every subcommand
composes module operations.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import acceptance, svg
from .core import PointConfig, derive_params, green_halfplane, multipoint_interior_bound
from .estimators import exponent_fit
from .geometry import circle_family, family_bound_product
from .harness import ExperimentConfig, run_experiment
from .loewner import sample_driver, trace_from_driver


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def _parse_points(text: str):
    pts = []
    for tok in text.split(","):
        tok = tok.strip().replace("i", "j")
        z = complex(tok)
        pts.append((z.real, z.imag))
    return tuple(pts)


def _parse_floats(text: str):
    return tuple(float(tok) for tok in text.split(","))


def cmd_simulate(args) -> int:
    p = derive_params(args.kappa)
    path = sample_driver(p, args.t, args.steps, args.seed)
    trace = trace_from_driver(path)
    out = Path(args.out)
    trace.to_csv(out)
    print(f"trace: {len(trace.vertices)} vertices -> {out}")
    if args.svg:
        svg.polyline_svg(trace.vertices, args.svg, title=f"SLE kappa={args.kappa}")
        print(f"svg -> {args.svg}")
    return 0


def cmd_bound(args) -> int:
    p = derive_params(args.kappa)
    cfg = PointConfig(
        points=[complex(a, b) for a, b in _parse_points(args.points)],
        radii=_parse_floats(args.radii),
    )
    bound = multipoint_interior_bound(cfg, p)
    levels, fam = circle_family(cfg)
    fprod = family_bound_product(fam, p)
    quant = PointConfig(
        points=[pt.z for pt in cfg.points],
        radii=[l / 4.0**h for l, h in zip(cfg.gaps, levels)],
    )
    cap = 4.0 ** (p.alpha * cfg.n**2)
    comparison = fprod <= cap * multipoint_interior_bound(quant, p) * (1 + 1e-9)
    print(f"multipoint_interior_bound: {_fmt(bound)}")
    print(f"family_bound_product:      {_fmt(fprod)}")
    print(
        f"family <= 4^(alpha n^2) x quantised bound: "
        f"{'OK' if comparison else 'VIOLATED'}"
    )
    if args.json:
        Path(args.json).write_text(fam.to_json(indent=2))
        print(f"circle family -> {args.json}")
    if args.svg:
        svg.circles_svg(fam.to_records(), args.svg)
        print(f"svg -> {args.svg}")
    return 0 if comparison else 1


def cmd_green(args) -> int:
    p = derive_params(args.kappa)
    pts = [complex(a, b) for a, b in _parse_points(args.points)]
    rows = [(z, green_halfplane(z, p)) for z in pts]
    out = Path(args.out)
    with open(out, "w") as fh:
        fh.write("re,im,green\n")
        for z, g in rows:
            fh.write(f"{z.real!r},{z.imag!r},{g!r}\n")
    for z, g in rows:
        print(f"G({_fmt(z.real)}{z.imag:+.12g}i) = {_fmt(g)}")
    if args.svg:
        ys = sorted({z.imag for z, _ in rows if z.imag > 0})
        if len(ys) >= 2:
            vals = [green_halfplane(complex(0, y), p) for y in ys]
            svg.loglog_svg(
                ys, vals, args.svg,
                fit=(p.d - 2.0, 0.0),
                xlabel="Im z", ylabel="G",
                title=f"Green vs height, kappa={args.kappa}",
            )
        else:
            svg.loglog_svg(
                [z.imag for z, _ in rows],
                [g for _, g in rows],
                args.svg,
                xlabel="Im z",
                ylabel="G",
            )
        print(f"svg -> {args.svg}")
    return 0


def _config_override(args, fields):
    if getattr(args, "config", None):
        text = Path(args.config).read_text()
        data = json.loads(text)
        for k, v in data.items():
            if k in fields:
                setattr(args, k.replace("-", "_"), v)
    return args


def cmd_hit_prob(args) -> int:
    cfg = ExperimentConfig(
        kappa=args.kappa,
        kind="hit-prob",
        points=_parse_points(args.points),
        radii=_parse_floats(args.radii),
        n_samples=args.samples,
        seed=args.seed,
        engine=args.engine,
        workers=args.workers,
        escape_factor=args.escape_factor,
        c_res=args.c_res,
        outdir=args.out,
    )
    manifest = run_experiment(cfg)
    for row in manifest["results"]:
        print(f"{row['estimand']}: {_fmt(row['mean'])} +- {_fmt(row['stderr'])}")
    print(f"manifest -> {Path(cfg.outdir) / 'manifest.json'}")
    return 0


def cmd_mink(args) -> int:
    cfg = ExperimentConfig(
        kappa=args.kappa,
        kind="mink-moments",
        domain=_parse_floats(args.domain),
        radii=_parse_floats(args.radii),
        n_samples=args.samples,
        n_max=args.n_max,
        seed=args.seed,
        engine=args.engine,
        workers=args.workers,
        outdir=args.out,
    )
    manifest = run_experiment(cfg)
    m1 = {}
    for row in manifest["results"]:
        print(f"{row['estimand']}: {_fmt(row['mean'])} +- {_fmt(row['stderr'])}")
        if row["estimand"].startswith("content_moment[m=1"):
            r = float(row["estimand"].split("r=")[1].rstrip("]"))
            m1[r] = row["mean"]
    if args.svg and len(m1) >= 2:
        rs = sorted(m1)
        svg.loglog_svg(
            rs, [m1[r] for r in rs], args.svg,
            xlabel="r", ylabel="E[content]",
            title=f"content vs r, kappa={args.kappa}",
        )
        print(f"svg -> {args.svg}")
    return 0


def cmd_verify(args) -> int:
    names = None
    scale = args.scale
    workers = args.workers
    if args.config:
        data = json.loads(Path(args.config).read_text())
        names = data.get("criteria", None)
        scale = data.get("scale", scale)
        workers = data.get("workers", workers)
    results = acceptance.run_criteria(names, scale=scale, workers=workers)
    return 0 if all(r.passed for r in results) else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="slelab", description="numerical laboratory for chordal SLE"
    )
    sub = ap.add_subparsers(dest="cmd", required=True)

    s = sub.add_parser("simulate", help="sample a driver and emit the trace")
    s.add_argument("--kappa", type=float, required=True)
    s.add_argument("--t", type=float, default=1.0)
    s.add_argument("--steps", type=int, default=10_000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", default="trace.csv")
    s.add_argument("--svg", default=None)
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("bound", help="closed-form bound product + circle family")
    s.add_argument("--kappa", type=float, required=True)
    s.add_argument("--points", required=True, help="comma list, e.g. '0+1j,0+2j'")
    s.add_argument("--radii", required=True, help="comma list, e.g. '0.1,0.1'")
    s.add_argument("--json", default=None, help="write circle family JSON here")
    s.add_argument("--svg", default=None)
    s.set_defaults(func=cmd_bound)

    s = sub.add_parser("green", help="evaluate the half-plane Green's function")
    s.add_argument("--kappa", type=float, required=True)
    s.add_argument("--points", required=True)
    s.add_argument("--out", default="green.csv")
    s.add_argument("--svg", default=None)
    s.set_defaults(func=cmd_green)

    s = sub.add_parser("hit-prob", help="Monte Carlo hitting probability")
    s.add_argument("--kappa", type=float, required=True)
    s.add_argument("--points", required=True)
    s.add_argument("--radii", required=True)
    s.add_argument("--samples", type=int, default=1000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--engine", default="auto", choices=["auto", "trace", "flow"])
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--escape-factor", type=float, default=8.0, dest="escape_factor")
    s.add_argument("--c-res", type=float, default=100.0, dest="c_res")
    s.add_argument("--out", default="runs/hit-prob")
    s.add_argument("--config", default=None, help="JSON overriding these flags")
    s.set_defaults(func=cmd_hit_prob)

    s = sub.add_parser("mink", help="Minkowski-content moments")
    s.add_argument("--kappa", type=float, required=True)
    s.add_argument("--domain", required=True, help="x0,x1,y0,y1")
    s.add_argument("--radii", required=True)
    s.add_argument("--samples", type=int, default=500)
    s.add_argument("--n-max", type=int, default=3, dest="n_max")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--engine", default="auto", choices=["auto", "trace", "flow"])
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--out", default="runs/mink")
    s.add_argument("--svg", default=None)
    s.add_argument("--config", default=None)
    s.set_defaults(func=cmd_mink)

    s = sub.add_parser("verify", help="run acceptance criteria, print PASS/FAIL")
    s.add_argument("--config", default=None, help='JSON: {"criteria": [...], "scale": 1.0}')
    s.add_argument("--criteria", default=None, help="comma list, e.g. c1,c2,c9")
    s.add_argument("--scale", type=float, default=1.0)
    s.add_argument("--workers", type=int, default=1)
    s.set_defaults(func=cmd_verify)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.cmd == "verify" and args.criteria and not args.config:
        import types

        names = [c.strip() for c in args.criteria.split(",") if c.strip()]
        results = acceptance.run_criteria(
            names, scale=args.scale, workers=args.workers
        )
        return 0 if all(r.passed for r in results) else 1
    try:
        return args.func(args)
    except (ValueError, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
