import math

import numpy as np
import pytest

from slelab.core import PointConfig, derive_params, green_halfplane
from slelab.estimators import (
    EstimateResult,
    HalfDisk,
    Rect,
    content_moments,
    exponent_fit,
    hit_min_scales,
    hit_prob,
    integral_lk_bound,
    minkowski_content,
    resolve_engine,
)
from slelab.loewner import SimConfig, Trace

P83 = derive_params(8.0 / 3.0)


class TestExponentFit:
    def test_exact_power_law(self):
        radii = [0.4, 0.2, 0.1, 0.05]
        ests = [EstimateResult(r**0.75, 0.0, 1000) for r in radii]
        fit = exponent_fit(radii, ests)
        assert fit.slope == pytest.approx(0.75, abs=1e-12)
        assert fit.slope_stderr == 0.0

    def test_noisy_quadratic(self):
        rng = np.random.default_rng(3)
        radii = [0.4, 0.2, 0.1, 0.05, 0.025]
        ests = []
        for r in radii:
            p = 0.3 * r**2
            noise = rng.normal(0, 0.03 * p)
            ests.append(EstimateResult(p + noise, 0.03 * p, 10_000))
        fit = exponent_fit(radii, ests)
        assert abs(fit.slope - 2.0) <= 3.0 * fit.slope_stderr + 0.05

    def test_needs_three_radii(self):
        ests = [EstimateResult(0.5, 0.01, 100)] * 2
        with pytest.raises(ValueError):
            exponent_fit([0.2, 0.1], ests)

    def test_rejects_zero_probability(self):
        ests = [
            EstimateResult(0.5, 0.01, 100),
            EstimateResult(0.0, 0.0, 100),
            EstimateResult(0.1, 0.01, 100),
        ]
        with pytest.raises(ValueError):
            exponent_fit([0.4, 0.2, 0.1], ests)


class TestHitProb:
    def test_huge_radius_always_hits(self):
        # the curve starts at the origin, inside any huge disk
        cfg = PointConfig(points=[1j], radii=[40.0])
        est = hit_prob(cfg, P83, 50, SimConfig(engine="trace"), seed=5)
        assert est.mean == 1.0

    def test_rejects_zero_samples(self):
        cfg = PointConfig(points=[1j], radii=[0.5])
        with pytest.raises(ValueError):
            hit_prob(cfg, P83, 0, SimConfig(), seed=5)

    def test_resolution_floor(self):
        cfg = PointConfig(points=[1j], radii=[0.5])
        # c_res = 16 puts the floor 8*sqrt(dt) = 2r above the radius
        with pytest.raises(ValueError):
            hit_prob(cfg, P83, 10, SimConfig(c_res=16.0), seed=5)

    def test_engines_agree_on_saturated_event(self):
        cfg = PointConfig(points=[0.5j], radii=[3.0])
        a = hit_prob(cfg, P83, 40, SimConfig(engine="trace"), seed=8)
        b = hit_prob(cfg, P83, 40, SimConfig(engine="flow"), seed=8)
        assert a.mean == 1.0 and b.mean == 1.0

    def test_binomial_stderr(self):
        cfg = PointConfig(points=[1j], radii=[0.4])
        est = hit_prob(cfg, P83, 200, SimConfig(engine="flow"), seed=9)
        want = math.sqrt(est.mean * (1 - est.mean) / 200)
        assert est.stderr == pytest.approx(want, rel=1e-12)

    def test_monotone_in_radius_coupled(self):
        cfg = PointConfig(points=[1j, 0.5 + 1j], radii=[0.3, 0.3])
        scales, _ = hit_min_scales(
            cfg, P83, 60, SimConfig(engine="flow"), seed=11
        )
        smaller = np.all(scales <= 0.25, axis=1).mean()
        bigger = np.all(scales <= 0.3, axis=1).mean()
        assert bigger >= smaller

    def test_flow_fences_low_interior_points(self):
        # radius comparable to the height: watched by a picket fence
        cfg = PointConfig(points=[0.35j], radii=[0.3])
        est = hit_prob(cfg, P83, 40, SimConfig(engine="flow"), seed=5)
        assert 0.0 <= est.mean <= 1.0

    def test_workers_reproduce_serial(self):
        cfg = PointConfig(points=[1j], radii=[0.5])
        a = hit_prob(cfg, P83, 150, SimConfig(engine="flow", workers=1), seed=13)
        b = hit_prob(cfg, P83, 150, SimConfig(engine="flow", workers=2), seed=13)
        assert a.mean == b.mean


class TestResolveEngine:
    def test_explicit_choice_wins(self):
        assert resolve_engine(SimConfig(engine="trace"), 1e-4, 8.0, 10**6) == "trace"
        assert resolve_engine(SimConfig(engine="flow"), 1e-2, 8.0, 10) == "flow"

    def test_auto_picks_trace_for_small_jobs(self):
        sim = SimConfig()
        assert resolve_engine(sim, 1e-3, 4.0, 10) == "trace"
        assert resolve_engine(sim, 1e-5, 10.0, 10**5) == "flow"


class TestMinkowskiContent:
    def stadium_trace(self):
        return Trace(vertices=np.array([0.0, 1j]), times=np.array([0.0, 1.0]))

    def test_stadium_closed_form(self):
        # segment [0, i] with the domain tall enough to hold the top cap:
        # rectangle 2r x 1 plus the top half-disk cap; the bottom cap lies
        # below the real axis and never counts
        D = Rect(-1.0, 1.0, 0.0, 1.5)
        for r in (0.1, 0.05):
            area = 2 * r * 1.0 + math.pi * r * r / 2.0
            want = r ** (P83.d - 2.0) * area
            got = minkowski_content(self.stadium_trace(), D, r, r / 10.0, P83)
            assert got == pytest.approx(want, rel=0.01)

    def test_stadium_clipped_by_domain(self):
        # a domain ending at the segment tip clips the top cap exactly
        D = Rect(-1.0, 1.0, 0.0, 1.0)
        r = 0.1
        want = r ** (P83.d - 2.0) * (2 * r * 1.0)
        got = minkowski_content(self.stadium_trace(), D, r, r / 10.0, P83)
        assert got == pytest.approx(want, rel=0.01)

    def test_far_trace_gives_zero(self):
        D = Rect(3.0, 4.0, 0.5, 1.5)
        got = minkowski_content(self.stadium_trace(), D, 0.1, 0.02, P83)
        assert got == 0.0

    def test_grid_step_validation(self):
        D = Rect(-1.0, 1.0, 0.0, 1.0)
        with pytest.raises(ValueError):
            minkowski_content(self.stadium_trace(), D, 0.1, 0.05, P83)

    def test_tiny_domain_errors(self):
        with pytest.raises(ValueError):
            Rect(0.0, 0.0, 0.0, 1.0)


class TestContentMoments:
    def test_moments_positive_and_ordered(self):
        D = Rect(-1.0, 1.0, 0.2, 1.2)
        cm = content_moments(
            P83, D, [0.4, 0.2], 2, 25, SimConfig(engine="flow"), seed=21
        )
        for key, est in cm.table.items():
            assert est.mean > 0.0
        # second moment dominates squared first moment (Jensen)
        for r in (0.4, 0.2):
            assert cm.table[(2, r)].mean >= cm.table[(1, r)].mean ** 2 * 0.99

    def test_trace_engine_matches_flow_scale(self):
        D = Rect(-1.0, 1.0, 0.2, 1.2)
        sim_f = SimConfig(engine="flow", escape_factor=3.0)
        sim_t = SimConfig(engine="trace", escape_factor=3.0)
        a = content_moments(P83, D, [0.5], 1, 20, sim_f, seed=22)
        b = content_moments(P83, D, [0.5], 1, 20, sim_t, seed=22)
        ma, mb = a.table[(1, 0.5)], b.table[(1, 0.5)]
        comb = math.hypot(ma.stderr, mb.stderr)
        assert abs(ma.mean - mb.mean) <= max(4.0 * comb, 0.35 * mb.mean)

    def test_rejects_large_order(self):
        D = Rect(-1.0, 1.0, 0.2, 1.2)
        with pytest.raises(ValueError):
            content_moments(P83, D, [0.4], 5, 10, SimConfig(), seed=1)


class TestIntegralBound:
    def test_halfdisk_closed_form(self):
        # n=1 on the half-disk: integral of |z|^(d-2) = pi R^d / d
        for R in (1.0, 2.0):
            dom = HalfDisk(R)
            est = integral_lk_bound(dom, 1, 40_000, P83, seed=3)
            want = math.pi * R**P83.d / P83.d
            assert abs(est.mean - want) <= 4 * est.stderr + 0.01 * want

    def test_far_small_domain(self):
        # integrand nearly constant = dist^(d-2) on a far small rectangle
        dom = Rect(10.0, 10.2, 5.0, 5.2)
        est = integral_lk_bound(dom, 1, 20_000, P83, seed=4)
        dist = abs(complex(10.1, 5.1))
        want = dom.area * dist ** (P83.d - 2.0)
        assert est.mean == pytest.approx(want, rel=0.01)

    def test_kappa_near_8_gives_area_power(self):
        p = derive_params(8.0 - 1e-9)
        dom = Rect(0.0, 1.0, 0.0, 1.0)
        est = integral_lk_bound(dom, 2, 20_000, p, seed=5)
        assert est.mean == pytest.approx(dom.area**2, rel=1e-6)

    def test_rejects_undersampled(self):
        with pytest.raises(ValueError):
            integral_lk_bound(HalfDisk(1.0), 1, 100, P83)

    def test_always_finite_for_larger_n(self):
        dom = Rect(-1.0, 1.0, 0.0, 1.0)
        est = integral_lk_bound(dom, 3, 30_000, P83, seed=6)
        assert math.isfinite(est.mean)
        assert est.mean > 0


class TestGreenConsistency:
    def test_content_mean_tracks_green_integral(self):
        # m=1 content over two domains, one fitted constant
        sim = SimConfig(engine="flow")
        r = [0.3]
        d1 = Rect(-1.0, 1.0, 0.2, 1.2)
        d2 = Rect(-0.25, 1.25, 0.35, 1.05)
        k = {}
        for name, dom in (("d1", d1), ("d2", d2)):
            cm = content_moments(P83, dom, r, 1, 220, sim, seed=29)
            gi = _green_integral(dom)
            k[name] = cm.table[(1, 0.3)].mean / gi
        assert abs(k["d1"] / k["d2"] - 1.0) <= 0.3


def _green_integral(dom, n=64):
    xs = np.linspace(dom.x0, dom.x1, n)
    ys = np.linspace(dom.y0, dom.y1, n)
    vals = np.empty((n, n))
    for i, x in enumerate(xs):
        for j, y in enumerate(ys):
            vals[i, j] = green_halfplane(complex(x, y), P83)
    return float(np.trapezoid(np.trapezoid(vals, ys, axis=1), xs))
