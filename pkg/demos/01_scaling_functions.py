#!/usr/bin/env python3
"""Tour of the scaling calculus behind the hitting bounds.

The two-regime function P_y interpolates between the interior decay
x^(2-d) below the gap height y and the boundary decay x^alpha above it.
Every multi-point bound in the package is a product of ratios of these
functions, so this demo plots the profiles, checks the comparison
sandwich numerically, and prints the worked bound products.
"""

import math
from pathlib import Path

import numpy as np

from slelab import (
    PointConfig,
    derive_params,
    multipoint_interior_bound,
    boundary_green_upper,
    p_scaling,
)
from slelab.svg import loglog_svg

OUT = Path(__file__).parent / "out"
OUT.mkdir(exist_ok=True)


def main():
    p = derive_params(8.0 / 3.0)
    print(f"kappa=8/3: d={p.d:.4f}, alpha={p.alpha:.4f}, 2-d={p.interior_exponent:.4f}")

    xs = np.logspace(-2, 0.5, 60)
    ys = p_scaling(1.0, xs, p)
    loglog_svg(
        xs.tolist(), ys.tolist(), OUT / "scaling_profile.svg",
        xlabel="x", ylabel="P_1(x)",
        title="two-regime scaling profile (kink at x = y = 1)",
    )
    print(f"profile -> {OUT / 'scaling_profile.svg'}")

    # the sandwich (x1/x2)^alpha <= P_y(x1)/P_y(x2) <= (x1/x2)^(2-d)
    rng = np.random.default_rng(1)
    y = rng.uniform(0, 2, 10_000)
    x1 = rng.uniform(0, 3, 10_000)
    x2 = x1 + rng.uniform(1e-9, 3, 10_000)
    ratio = p_scaling(y, x1, p) / p_scaling(y, x2, p)
    ok = np.all(ratio >= (x1 / x2) ** p.alpha - 1e-12) and np.all(
        ratio <= (x1 / x2) ** p.interior_exponent + 1e-12
    )
    print(f"comparison sandwich on 10^4 random triples: {'holds' if ok else 'FAILS'}")

    # worked products
    cfg = PointConfig(points=[1j, 2j], radii=[0.1, 0.1])
    print(
        "interior bound for z=(i, 2i), r=0.1 at kappa=2:",
        f"{multipoint_interior_bound(cfg, derive_params(2.0)):.6f}",
        "(= 10^-1.5)",
    )
    print(
        "boundary bound for x=(1, 1.1) at kappa=8/3:",
        f"{boundary_green_upper([1.0, 1.1], p):.4f}",
    )


if __name__ == "__main__":
    main()
