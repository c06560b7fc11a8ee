import math

import numpy as np
import pytest

from slelab.core import PointConfig, derive_params, multipoint_interior_bound, p_scaling
from slelab.geometry import (
    Circle,
    GeometryInvariantError,
    build_circles,
    check_run_counts,
    circle_family,
    circles_disjoint,
    family_bound_product,
    partition_runs,
    prune_conflicts,
    quantize_radii,
    skipped_annulus_counts,
)


def pipeline(cfg):
    levels = quantize_radii(cfg)
    circles = build_circles(cfg, levels)
    pruned = prune_conflicts(circles, cfg)
    fam = partition_runs(pruned, cfg)
    check_run_counts(fam, cfg)
    return levels, circles, pruned, fam


class TestQuantize:
    def test_exact_power(self):
        cfg = PointConfig(points=[1j], radii=[1.0 / 16.0])
        assert quantize_radii(cfg) == [2]

    def test_round_down(self):
        cfg = PointConfig(points=[1j], radii=[1.0 / 10.0])
        assert quantize_radii(cfg) == [2]  # 1/16 <= 1/10

    def test_huge_radius_clamps_to_one(self):
        cfg = PointConfig(points=[1j], radii=[5.0])
        assert quantize_radii(cfg) == [1]

    def test_quantised_radius_below_target(self):
        rng = np.random.default_rng(3)
        for _ in range(200):
            l = rng.uniform(0.1, 3.0)
            r = rng.uniform(1e-4, 2 * l)
            cfg = PointConfig(points=[complex(0, l)], radii=[r])
            h = quantize_radii(cfg)[0]
            assert h >= 1
            if r < l / 4.0:
                assert l / 4.0**h <= r * (1 + 1e-12)
                assert l / 4.0 ** (h - 1) > r  # rounded down, not further


class TestBuildCircles:
    def test_single_point(self):
        cfg = PointConfig(points=[1j], radii=[1.0 / 16.0])
        circles = build_circles(cfg, [2])
        assert [(c.level, c.radius) for c in circles] == [(1, 0.25), (2, 0.0625)]
        assert all(c.center == 1j for c in circles)

    def test_gap_arithmetic(self):
        cfg = PointConfig(points=[1j, 1j + 0.5], radii=[0.3, 0.2])
        circles = build_circles(cfg, [1, 1])
        assert circles[0].radius == pytest.approx(0.25)
        assert circles[1].radius == pytest.approx(0.125)  # gap 0.5 / 4

    def test_empty(self):
        cfg = PointConfig(points=[], radii=[])
        assert build_circles(cfg, []) == []

    def test_origin_never_enclosed(self):
        rng = np.random.default_rng(9)
        for _ in range(100):
            z = complex(rng.uniform(-2, 2), rng.uniform(0, 2))
            if abs(z) < 1e-3:
                continue
            cfg = PointConfig(points=[z], radii=[rng.uniform(1e-3, 1.0)])
            for c in build_circles(cfg, quantize_radii(cfg)):
                assert abs(c.center) > c.radius


class TestPrune:
    def test_far_points_nothing_pruned(self):
        cfg = PointConfig(points=[1j, 10 + 1j], radii=[0.01, 0.01])
        levels = quantize_radii(cfg)
        circles = build_circles(cfg, levels)
        assert prune_conflicts(circles, cfg) == circles

    def test_interval_example(self):
        # z1 = i, z2 = i + 0.3: core disk radius 0.075; the level-1 circle
        # of z1 (radius 0.25) meets it since 0.225 <= 0.25 <= 0.375.
        cfg = PointConfig(points=[1j, 1j + 0.3], radii=[0.01, 0.01])
        levels = quantize_radii(cfg)
        circles = build_circles(cfg, levels)
        pruned = prune_conflicts(circles, cfg)
        removed = set((c.owner, c.level) for c in circles) - set(
            (c.owner, c.level) for c in pruned
        )
        assert removed == {(0, 1)}

    def test_single_point_unchanged(self):
        cfg = PointConfig(points=[1j], radii=[0.02])
        circles = build_circles(cfg, quantize_radii(cfg))
        assert prune_conflicts(circles, cfg) == circles


class TestPartition:
    def test_single_owner_single_run(self):
        cfg = PointConfig(points=[1j], radii=[0.003])
        levels, _, pruned, fam = pipeline(cfg)
        assert len(fam.runs) == 1
        run = fam.runs[0]
        assert run.levels == tuple(range(1, levels[0] + 1))
        assert run.radius_big == pytest.approx(0.25)

    def test_gap_in_levels_splits_run(self):
        cfg = PointConfig(points=[1j], radii=[0.003])
        circles = [c for c in build_circles(cfg, [4]) if c.level != 2]
        fam = partition_runs(circles, cfg)
        assert sorted(run.levels for run in fam.runs) == [(1,), (3, 4)]
        # hand-made hole exceeds the pipeline count bound for n = 1
        with pytest.raises(GeometryInvariantError):
            check_run_counts(fam, cfg)

    def test_blocking_circle_splits_run(self):
        # owner-1 circle of radius 0.0075 at distance 0.03 sits inside the
        # open annulus (1/64, 1/16) and severs the level 2-3 edge.
        cfg = PointConfig(points=[1j, 1j + 0.03], radii=[1.0 / 256.0, 0.0075])
        levels, circles, pruned, fam = pipeline(cfg)
        assert levels == [4, 1]
        assert len(pruned) == len(circles)  # nothing pruned, only blocked
        owner0 = sorted(r.levels for r in fam.runs if r.owner == 0)
        assert owner0 == [(1, 2), (3, 4)]

    def test_two_run_product_dominates_full_ratio(self):
        p = derive_params(8.0 / 3.0)
        cfg = PointConfig(points=[1j, 1j + 0.03], radii=[1.0 / 256.0, 0.0075])
        _, _, _, fam = pipeline(cfg)
        prod = family_bound_product(fam, p)
        runs0 = [r for r in fam.runs if r.owner == 0]
        expected = 1.0
        for r in runs0:
            expected *= p_scaling(1.0, r.radius_small, p) / p_scaling(
                1.0, r.radius_big, p
            )
        assert prod == pytest.approx(expected, rel=1e-12)
        full = p_scaling(1.0, 1.0 / 256.0, p) / p_scaling(1.0, 0.25, p)
        assert prod >= full * (1 - 1e-12)

    def test_single_circle_run_contributes_one(self):
        p = derive_params(2.0)
        cfg = PointConfig(points=[1j], radii=[2.0])
        _, _, _, fam = pipeline(cfg)
        assert len(fam.runs) == 1
        assert fam.runs[0].count == 1
        assert family_bound_product(fam, p) == pytest.approx(1.0)

    def test_telescoping_single_run(self):
        p = derive_params(2.0)
        cfg = PointConfig(points=[2j], radii=[0.01])
        levels, _, _, fam = pipeline(cfg)
        h = levels[0]
        got = family_bound_product(fam, p)
        want = p_scaling(2.0, 2.0 / 4.0**h, p) / p_scaling(2.0, 0.5, p)
        assert got == pytest.approx(want, rel=1e-12)

    def test_records_roundtrip(self):
        cfg = PointConfig(points=[1j, 1j + 0.3], radii=[0.01, 0.01])
        _, _, pruned, fam = pipeline(cfg)
        recs = fam.to_records()
        assert len(recs) == len(pruned)
        assert {r["run"] for r in recs} == set(range(len(fam.runs)))
        for r in recs:
            assert set(r) == {"owner", "level", "center", "radius", "run"}


def random_config(rng, n):
    pts = []
    while len(pts) < n:
        if rng.random() < 0.25:
            z = complex(rng.uniform(-3, 3), 0.0)
        else:
            z = complex(rng.uniform(-3, 3), rng.uniform(0, 3))
        if abs(z) < 1e-2 or any(abs(z - w) < 1e-2 for w in pts):
            continue
        pts.append(z)
    radii = 10 ** rng.uniform(-3, 0.3, size=n)
    return PointConfig(points=pts, radii=radii)


class TestFamilyInvariants:
    """Randomised structural checks over the full construction pipeline."""

    N_CONFIGS = 1000

    def test_random_configs(self):
        rng = np.random.default_rng(20240811)
        p = derive_params(8.0 / 3.0)
        for _ in range(self.N_CONFIGS):
            n = int(rng.integers(1, 7))
            cfg = random_config(rng, n)
            levels, circles, pruned, fam = pipeline(cfg)

            # pairwise disjointness of the pruned set, exact interval arithmetic
            for i in range(len(pruned)):
                for k in range(i + 1, len(pruned)):
                    assert circles_disjoint(pruned[i], pruned[k])

            # per-owner run counts within 1 + 3(n-j), checked inside
            # partition_runs; skipped annuli within 1 + 2(n-j)
            skipped = skipped_annulus_counts(fam, cfg, levels)
            assert len(skipped) == n

            # closing comparison with the plain product at quantised radii
            quant = PointConfig(
                points=[pt.z for pt in cfg.points],
                radii=[l / 4.0**h for l, h in zip(cfg.gaps, levels)],
            )
            fam_prod = family_bound_product(fam, p)
            plain = multipoint_interior_bound(quant, p)
            cap = 4.0 ** (p.alpha * n * n)
            assert fam_prod <= cap * plain * (1 + 1e-9)

            # no circle encloses or touches the origin
            for c in pruned:
                assert abs(c.center) > c.radius

    def test_conflict_sets_at_most_one(self):
        # |I_{j,k}| <= 1 is asserted inside prune_conflicts; sweep random
        # configurations to exercise it, including tight clusters.
        rng = np.random.default_rng(77)
        for _ in range(300):
            n = int(rng.integers(2, 7))
            pts = []
            base = complex(rng.uniform(-1, 1), rng.uniform(0.2, 1.0))
            while len(pts) < n:
                z = base + complex(rng.uniform(-0.3, 0.3), rng.uniform(-0.2, 0.3))
                if z.imag < 0:
                    z = complex(z.real, 0.0)
                if abs(z) < 1e-2 or any(abs(z - w) < 1e-3 for w in pts):
                    continue
                pts.append(z)
            cfg = PointConfig(points=pts, radii=10 ** rng.uniform(-3, -0.5, size=n))
            levels = quantize_radii(cfg)
            circles = build_circles(cfg, levels)
            prune_conflicts(circles, cfg)  # raises on violation


class TestCircleValidation:
    def test_rejects_origin_enclosure(self):
        with pytest.raises(ValueError):
            Circle(owner=0, level=1, center=0.1 + 0j, radius=0.5)

    def test_rejects_bad_level(self):
        with pytest.raises(ValueError):
            Circle(owner=0, level=0, center=1j, radius=0.1)
