"""Monte Carlo estimators: hitting probabilities, exponent fits, content moments.

Hitting events come from one of two engines (see loewner):

* trace -- exact polyline distances.  The event is dist(z_k, polyline) <= r_k.
* flow  -- conformal gauges.  Each marked point is probed at
  z' = x + i*max(y, 2 r) with threshold r, so the gauge ceiling Im(z')
  stays at least twice the threshold and a latched gauge certifies a
  close approach of the hull at scale r (within the Koebe factor-two
  bracket).  For boundary points the lift height 2r scales with r, which
  preserves the boundary exponent; all absolute constants are absorbed by
  the exponent/ratio checks downstream.

Both engines share driver substreams, so estimates are coupled across
radii when evaluated on the same sample range.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .core import PointConfig, SleParams
from .loewner import (
    SimConfig,
    Trace,
    escape_radius,
    flow_scan_sample,
    scan_trace_sample,
    trace_from_driver,
    sample_driver,
    _ChunkedDriver,
)

__all__ = [
    "EstimateResult",
    "ExponentFit",
    "Rect",
    "HalfDisk",
    "ContentMoments",
    "hit_prob",
    "hit_min_scales",
    "hitting_exponent",
    "exponent_fit",
    "minkowski_content",
    "content_moments",
    "integral_lk_bound",
    "resolve_engine",
]


@dataclass(frozen=True)
class EstimateResult:
    mean: float
    stderr: float
    n_samples: int
    config_hash: str = ""

    def agrees_with(self, other: "EstimateResult", n_sigma: float = 3.0) -> bool:
        comb = math.hypot(self.stderr, other.stderr)
        return abs(self.mean - other.mean) <= n_sigma * comb


@dataclass(frozen=True)
class ExponentFit:
    slope: float
    slope_stderr: float
    intercept: float
    radii: tuple
    probs: tuple


@dataclass(frozen=True)
class Rect:
    """Axis-aligned rectangle in the closed upper half-plane."""

    x0: float
    x1: float
    y0: float
    y1: float

    def __post_init__(self):
        if not (self.x1 > self.x0 and self.y1 > self.y0):
            raise ValueError("rectangle must have positive extent")
        if self.y0 < 0.0:
            raise ValueError("rectangle must lie in the upper half-plane")

    @property
    def area(self) -> float:
        return (self.x1 - self.x0) * (self.y1 - self.y0)

    @property
    def far_corner(self) -> float:
        return max(
            math.hypot(x, y) for x in (self.x0, self.x1) for y in (self.y0, self.y1)
        )

    def contains(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        return (
            (z.real >= self.x0)
            & (z.real <= self.x1)
            & (z.imag >= self.y0)
            & (z.imag <= self.y1)
        )

    def sample(self, gen, n: int) -> np.ndarray:
        return gen.uniform(self.x0, self.x1, n) + 1j * gen.uniform(self.y0, self.y1, n)

    def grid_centers(self, step: float) -> np.ndarray:
        nx = max(1, round((self.x1 - self.x0) / step))
        ny = max(1, round((self.y1 - self.y0) / step))
        xs = self.x0 + (np.arange(nx) + 0.5) * (self.x1 - self.x0) / nx
        ys = self.y0 + (np.arange(ny) + 0.5) * (self.y1 - self.y0) / ny
        return (xs[:, None] + 1j * ys[None, :]).ravel()

    def cell_area(self, step: float) -> float:
        nx = max(1, round((self.x1 - self.x0) / step))
        ny = max(1, round((self.y1 - self.y0) / step))
        return self.area / (nx * ny)


@dataclass(frozen=True)
class HalfDisk:
    """Half-disk |z| <= radius in the upper half-plane, centred at 0."""

    radius: float

    @property
    def area(self) -> float:
        return 0.5 * math.pi * self.radius**2

    @property
    def far_corner(self) -> float:
        return self.radius

    def contains(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        return (np.abs(z) <= self.radius) & (z.imag >= 0)

    def sample(self, gen, n: int) -> np.ndarray:
        # area-uniform in the half-disk
        r = self.radius * np.sqrt(gen.uniform(0.0, 1.0, n))
        th = gen.uniform(0.0, math.pi, n)
        return r * np.exp(1j * th)


def resolve_engine(
    sim: SimConfig, dt: float, resc: float, n_samples: int, horizon: float | None = None
) -> str:
    """Pick trace vs flow for an ensemble under the configured budget."""
    if sim.engine in ("trace", "flow"):
        return sim.engine
    if sim.engine != "auto":
        raise ValueError(f"unknown engine {sim.engine!r}")
    T = horizon if horizon is not None else resc * resc / 8.0
    steps = T / dt
    est_ops = n_samples * steps * steps / 2.0
    return "trace" if est_ops <= sim.trace_budget else "flow"


#: Points whose radius is comparable to their height (boundary points
#: included) are watched by a picket fence of gauge probes strung along
#: the circle |zeta - z| = r.  With arc spacing no bigger than the latch
#: fraction, any curve touching the disk passes within half a spacing of
#: some picket, whose gauge (bracketing distance within a factor of two)
#: then certainly drops below its latch: the fence catches every true
#: hit.  A fence can also fire on near-misses within ~2*latch*r of the
#: circle, and its latch cannot resolve below the driver's own resolution
#: scale sqrt(dt) ~ r/sqrt(c_res), so the screening stage runs with a
#: generous candidate latch and the rare candidates are re-examined on a
#: bridge-refined driver (the same Brownian realisation at dt/16) whose
#: finer fence shrinks the over-fire band to a few percent of r.  Pickets
#: sit at Im >= 2*latch*r to stay clear of their own gauge ceiling;
#: entries confined to that thin band next to the axis can be missed, a
#: small scale-uniform deficit absorbed by the exponent/ratio checks.
FENCE_SCREEN_LATCH = 0.1
FENCE_CANDIDATE = 0.6  # screening gauges below this multiple of r cascade
FENCE_REFINE = 16
FENCE_FINE_LATCH = 0.025


def _picket_fence(z: complex, r: float, latch: float):
    floor = 2.0 * latch * r
    n = max(8, math.ceil(2.0 * math.pi / latch))
    th = (np.arange(n) + 0.5) * 2.0 * math.pi / n
    pts = z + r * np.exp(1j * th)
    return pts[pts.imag >= floor]


def _fence_scale(session, z: complex, r: float) -> float:
    """Cascaded fence verdict for one point: scale <= r means hit.

    Screening: a picket whose gauge drops to half its ceiling (capped at
    FENCE_CANDIDATE * r) signals hull influence at the fence scale; such
    samples are re-examined with a fine fence on the bridge-refined
    driver.  Returns r * (min fine gauge) / (fine latch) for candidates,
    so thresholding at exactly r reproduces the staged event;
    screened-out samples report a value above r.
    """
    fence = _picket_fence(z, r, FENCE_SCREEN_LATCH)
    if fence.size == 0:
        return math.inf
    cand = 0.5 * np.minimum(fence.imag, 2.0 * FENCE_CANDIDATE * r)
    g, _ = session.gauges(fence, cand)
    rel = float(np.min(g / cand))
    if rel > 1.0:
        return rel * r  # above r: keeps the coupled-threshold order
    fine = session.refined(FENCE_REFINE)
    fence2 = _picket_fence(z, r, FENCE_FINE_LATCH)
    g2, _ = fine.gauges(fence2, np.full(fence2.shape[0], FENCE_FINE_LATCH * r))
    return float(np.min(g2)) / FENCE_FINE_LATCH


def _flow_requests(points, radii):
    """Gauge probes for the flow engine.

    Well-separated interior points (Im z >= 2r) probe themselves; points
    closer to the axis than that are marked for the fence cascade; a disk
    covering the curve's starting point is a certain hit.  Returns
    (probes, thresholds, groups): groups[k] is a probe index list, or
    "fence", or "hit".
    """
    gp, gthr, groups = [], [], []
    for z, r in zip(points, radii):
        z = complex(z)
        if abs(z) <= r:
            groups.append("hit")
        elif z.imag >= 2.0 * r:
            groups.append([len(gp)])
            gp.append(z)
            gthr.append(r)
        else:
            groups.append("fence")
    return np.array(gp, dtype=complex), np.array(gthr), groups


def _check_resolution(radii, dt, sim: SimConfig):
    floor = sim.resolution_floor(dt)
    bad = [r for r in radii if r < floor]
    if bad:
        raise ValueError(
            f"radii {bad} below the resolution floor {floor:.3g} for dt={dt:.3g}; "
            "increase c_res or the radii"
        )


def hit_min_scales(
    cfg: PointConfig,
    params: SleParams,
    n_samples: int,
    sim: SimConfig | None = None,
    seed: int = 0,
    sample_offset: int = 0,
    engine: str | None = None,
):
    """Per-sample closeness scales for every marked point.

    Returns (scales, engine): scales[i, k] is, under the trace engine, the
    exact distance from z_k to the sample polyline; under the flow engine
    the final conformal gauge for interior points, and for fence-watched
    points (boundary or near-boundary) the scaled minimum picket gauge of
    the cascade, so that scale <= r_k reproduces the staged event.
    Thresholding scales[i, k] against radii gives coupled hitting events,
    monotone in every radius; for fence-watched points only the threshold
    r_k itself is meaningful under the flow engine (fences are built from
    r_k).
    """
    sim = sim or SimConfig()
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    dt = sim.dt_for(min(cfg.radii))
    _check_resolution(cfg.radii, dt, sim)
    zs = [pt.z for pt in cfg.points]
    resc = escape_radius(zs, cfg.radii, sim.escape_factor)
    eng = engine or resolve_engine(sim, dt, resc, n_samples, sim.fixed_horizon)
    if eng == "trace":
        job = (_trace_chunk, (params, seed, sample_offset, dt, resc, zs, sim))
    elif eng == "flow":
        gp, gthr, groups = _flow_requests(zs, cfg.radii)
        job = (
            _flow_chunk,
            (params, seed, sample_offset, dt, resc, gp, gthr, groups,
             zs, list(cfg.radii), sim),
        )
    else:
        raise ValueError(f"unknown engine {eng!r}")
    out = _run_chunks(job, n_samples, sim.workers)
    return out, eng


#: Fixed reduction chunk: results are assembled chunk by chunk in sample
#: order, so the output is byte-identical for any worker count.
_CHUNK = 32


def _trace_chunk(args, start, count):
    params, seed, offset, dt, resc, zs, sim = args
    probes = np.array(zs, dtype=complex)
    out = np.empty((count, len(zs)))
    for i in range(count):
        mins, _ = scan_trace_sample(
            params, seed, offset + start + i, dt, resc, probes, sim
        )
        out[i] = mins
    return out


def _flow_chunk(args, start, count):
    from .loewner import FlowSession

    params, seed, offset, dt, resc, gp, gthr, groups, zs, radii, sim = args
    out = np.empty((count, len(groups)))
    for i in range(count):
        session = FlowSession(params, seed, offset + start + i, dt, resc, sim)
        gauges, _ = session.gauges(gp, gthr)
        for k, idx in enumerate(groups):
            if idx == "hit":
                out[i, k] = 0.0  # disk covers the origin: certain hit
            elif idx == "fence":
                out[i, k] = _fence_scale(session, complex(zs[k]), radii[k])
            else:
                out[i, k] = gauges[idx[0]]
    return out


def _run_chunks(job, n_samples, workers):
    fn, args = job
    if workers is None or workers <= 1 or n_samples <= _CHUNK:
        return fn(args, 0, n_samples)
    from concurrent.futures import ProcessPoolExecutor

    starts = list(range(0, n_samples, _CHUNK))
    parts = [None] * len(starts)
    with ProcessPoolExecutor(max_workers=workers) as ex:
        futs = {
            ex.submit(fn, args, s, min(_CHUNK, n_samples - s)): j
            for j, s in enumerate(starts)
        }
        for f in futs:
            parts[futs[f]] = f.result()
    # completion order is irrelevant: parts are placed by chunk index
    return np.concatenate(parts, axis=0)


def hit_prob(
    cfg: PointConfig,
    params: SleParams,
    n_samples: int,
    sim: SimConfig | None = None,
    seed: int = 0,
    sample_offset: int = 0,
    engine: str | None = None,
) -> EstimateResult:
    """Probability that the curve comes within r_k of every marked point.

    Fraction of independent samples whose closeness scale is <= r_k for
    all k, with binomial standard error.
    """
    scales, _ = hit_min_scales(
        cfg, params, n_samples, sim, seed, sample_offset, engine
    )
    events = np.all(scales <= np.asarray(cfg.radii), axis=1)
    p = float(events.mean())
    se = math.sqrt(max(p * (1.0 - p), 0.0) / n_samples)
    return EstimateResult(mean=p, stderr=se, n_samples=n_samples)


def hitting_exponent(
    z,
    radii,
    params: SleParams,
    n_per_radius: int,
    sim: SimConfig | None = None,
    seed: int = 0,
    engine: str | None = None,
):
    """Exponent fit of hit probability vs radius for one marked point.

    Each radius gets an independent ensemble of n_per_radius samples (own
    substream range, own grid resolution dt = r^2/c_res), so the runs are
    rescaled copies of each other and discretisation bias cancels in the
    fitted slope.  Returns (ExponentFit, list of EstimateResult).
    """
    sim = sim or SimConfig()
    estimates = []
    for j, r in enumerate(sorted(radii, reverse=True)):
        cfg = PointConfig(points=[z], radii=[r])
        estimates.append(
            hit_prob(
                cfg,
                params,
                n_per_radius,
                sim,
                seed=seed,
                sample_offset=j * n_per_radius,
                engine=engine,
            )
        )
    rs = sorted(radii, reverse=True)
    fit = exponent_fit(rs, estimates)
    return fit, estimates


def exponent_fit(radii, estimates) -> ExponentFit:
    """Weighted least-squares slope of log p against log r.

    Weights come from the delta-method stderr of log p; exact inputs
    (stderr 0) fall back to an unweighted fit with zero reported error.
    """
    radii = [float(r) for r in radii]
    if len(radii) < 3:
        raise ValueError("need at least 3 radii for an exponent fit")
    means = np.array([e.mean for e in estimates])
    errs = np.array([e.stderr for e in estimates])
    if np.any(means <= 0.0):
        raise ValueError("zero probability estimate; not enough samples")
    x = np.log(np.asarray(radii))
    y = np.log(means)
    sig = errs / means  # stderr of log p
    if np.all(sig == 0.0):
        w = np.ones_like(x)
        exact = True
    else:
        w = 1.0 / np.maximum(sig, 1e-12) ** 2
        exact = False
    sw = w.sum()
    xb = (w * x).sum() / sw
    yb = (w * y).sum() / sw
    sxx = (w * (x - xb) ** 2).sum()
    slope = (w * (x - xb) * (y - yb)).sum() / sxx
    intercept = yb - slope * xb
    slope_err = 0.0 if exact else math.sqrt(1.0 / sxx)
    return ExponentFit(
        slope=float(slope),
        slope_stderr=float(slope_err),
        intercept=float(intercept),
        radii=tuple(radii),
        probs=tuple(float(m) for m in means),
    )


# ---------------------------------------------------------------------------
# Minkowski content
# ---------------------------------------------------------------------------


def minkowski_content(
    trace: Trace,
    domain: Rect,
    r: float,
    grid_step: float,
    params: SleParams,
) -> float:
    """r^(d-2) times the grid-counted area of the trace's r-neighbourhood in D.

    Cells are counted when their centre lies within r of the polyline.
    Centres near the threshold get an exact segment check; for the rest a
    vertex KD-tree query decides (the max segment length bounds how far a
    vertex distance can overshoot the true polyline distance).
    """
    if r <= 0.0:
        raise ValueError("r must be positive")
    if grid_step > r / 4.0:
        raise ValueError("grid_step must be <= r/4")
    centers = domain.grid_centers(grid_step)
    if centers.size == 0:
        raise ValueError("domain smaller than one grid cell")
    v = trace.vertices
    pts = np.column_stack([v.real, v.imag])
    tree = cKDTree(pts)
    d_vert, _ = tree.query(np.column_stack([centers.real, centers.imag]))
    if v.shape[0] > 1:
        seg_len = np.abs(np.diff(v))
        slack = float(seg_len.max()) / 2.0 if seg_len.size else 0.0
    else:
        slack = 0.0
    inside = d_vert <= r - 1e-15
    # vertex distance never underestimates the polyline distance by more
    # than half a segment, so only a band around r needs the exact check
    band = (~inside) & (d_vert <= r + slack)
    if np.any(band) and v.shape[0] > 1:
        exact = _polyline_dist(v, centers[band])
        inside[np.where(band)[0][exact <= r]] = True
    area = float(inside.sum()) * domain.cell_area(grid_step)
    return r ** (params.d - 2.0) * area


def _polyline_dist(v: np.ndarray, zs: np.ndarray, chunk: int = 128) -> np.ndarray:
    a = v[:-1]
    e = v[1:] - a
    ee = e.real**2 + e.imag**2
    out = np.full(zs.shape[0], np.inf)
    for lo in range(0, a.shape[0], chunk):
        ac = a[lo : lo + chunk]
        ec = e[lo : lo + chunk]
        eec = ee[lo : lo + chunk]
        q = zs[:, None] - ac[None, :]
        t = (q.real * ec.real + q.imag * ec.imag) / np.where(eec > 0, eec, 1.0)
        t = np.clip(t, 0.0, 1.0)
        d = np.abs(q - t * ec[None, :])
        np.minimum(out, d.min(axis=1), out=out)
    return out


@dataclass(frozen=True)
class ContentMoments:
    """Moment table E[Cont(gamma ∩ D; r)^m] with stderrs, per neighbourhood radius."""

    radii: tuple
    orders: tuple
    table: dict  # (m, r) -> EstimateResult
    n_samples: int
    engine: str

    def ratio(self, m: int, r_fine: float, r_coarse: float) -> float:
        return self.table[(m, r_fine)].mean / self.table[(m, r_coarse)].mean


def content_moments(
    params: SleParams,
    domain: Rect,
    r_list,
    n_max: int,
    n_samples: int,
    sim: SimConfig | None = None,
    seed: int = 0,
    sample_offset: int = 0,
    engine: str | None = None,
    grid_rule: float = 4.0,
) -> ContentMoments:
    """Monte Carlo moments of the truncated-content observable.

    One sample ensemble serves every radius and moment order (common
    random numbers), which is what makes the refinement-ratio stability
    check sharp.  n_max is capped at 4: higher moments need ensembles far
    beyond desk scale.
    """
    sim = sim or SimConfig()
    if n_max > 4:
        raise ValueError("moments above m=4 are out of desk-scale reach")
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    r_list = sorted(float(r) for r in r_list)
    r_min = r_list[0]
    dt = sim.dt_for(r_min)
    resc = sim.escape_factor * (domain.far_corner + max(r_list))
    eng = engine or resolve_engine(sim, dt, resc, n_samples, sim.fixed_horizon)
    grid = r_min / grid_rule
    if eng == "flow":
        job = (
            _content_flow_chunk,
            (params, seed, sample_offset, dt, resc, domain, grid_rule, r_list, sim),
        )
    elif eng == "trace":
        job = (
            _content_trace_chunk,
            (params, seed, sample_offset, dt, resc, domain, grid, r_list, sim),
        )
    else:
        raise ValueError(f"unknown engine {eng!r}")
    contents = _run_chunks(job, n_samples, sim.workers)  # (n_samples, n_r)
    table = {}
    for m in range(1, n_max + 1):
        pw = contents**m
        mean = pw.mean(axis=0)
        var = np.maximum(pw.var(axis=0), 0.0)
        for jr, r in enumerate(r_list):
            table[(m, r)] = EstimateResult(
                mean=float(mean[jr]),
                stderr=float(math.sqrt(var[jr] / n_samples)),
                n_samples=n_samples,
            )
    return ContentMoments(
        radii=tuple(r_list),
        orders=tuple(range(1, n_max + 1)),
        table=table,
        n_samples=n_samples,
        engine=eng,
    )


def _content_flow_chunk(args, start, count):
    """Per-sample truncated contents under the flow engine, with pruned grids.

    Each radius r is counted on its own grid of step r/grid_rule.  Walking
    every cell through the flow would dominate the run, so the curve is
    localised first by a scout pass at a coarser time step; cells whose
    distance lower bound (Koebe: dist >= gauge/2, minus the cell-scout
    offset and a slack for the coarser scout driver) exceeds 2r cannot
    score at radius r and are skipped.  Survivors walk the full-resolution
    flow, one shared driver per sample.
    """
    params, seed, offset, dt, resc, domain, grid_rule, r_list, sim = args
    r_max = r_list[-1]
    grids = [domain.grid_centers(r / grid_rule) for r in r_list]
    cells = [domain.cell_area(r / grid_rule) for r in r_list]
    scale = [r ** (params.d - 2.0) for r in r_list]

    scout_gap = 2.0 * r_max
    nx = max(2, math.ceil((domain.x1 - domain.x0 + 2 * scout_gap) / scout_gap) + 1)
    ny = max(2, math.ceil((domain.y1 - domain.y0 + scout_gap) / scout_gap) + 1)
    sx = np.linspace(domain.x0 - scout_gap, domain.x1 + scout_gap, nx)
    sy = np.linspace(max(domain.y0 - scout_gap, scout_gap / 4), domain.y1 + scout_gap, ny)
    scouts = (sx[:, None] + 1j * sy[None, :]).ravel()
    dt_scout = min(sim.dt_for(scout_gap / 2.0), 64.0 * dt)
    # coarse-driver curve differs from the fine one by the driver's modulus
    # of continuity at the scout step; fold it into the certificate slack
    slack = 6.0 * math.sqrt(params.kappa * dt_scout)
    offs = [np.abs(g[:, None] - scouts[None, :]) for g in grids]

    out = np.empty((count, len(r_list)))
    for i in range(count):
        sg, _ = flow_scan_sample(
            params,
            seed,
            offset + start + i,
            dt_scout,
            resc,
            scouts,
            np.zeros(scouts.shape[0]),
            sim,
        )
        session = None
        for jr, r in enumerate(r_list):
            # dist(cell) >= max_s [gauge(scout_s)/2 - |cell - scout_s|] - slack
            lower = np.max(sg[None, :] / 2.0 - offs[jr], axis=1) - slack
            live = lower <= 2.0 * r
            n_live = int(live.sum())
            if n_live == 0:
                out[i, jr] = 0.0
                continue
            if session is None:
                from .loewner import FlowSession

                session = FlowSession(
                    params, seed, offset + start + i, dt, resc, sim
                )
            gauges, _ = session.gauges(grids[jr][live], np.full(n_live, r))
            out[i, jr] = scale[jr] * cells[jr] * float((gauges <= r).sum())
    return out


def _content_trace_chunk(args, start, count):
    params, seed, offset, dt, resc, domain, grid, r_list, sim = args
    out = np.empty((count, len(r_list)))
    steps_cap = max(16, math.ceil(resc * resc / 2.0 / dt))
    for i in range(count):
        drv = _ChunkedDriver(params, dt, seed, offset + start + i, steps_cap)
        drv.extend_to(steps_cap)
        path = _path_from_values(params, drv, dt, seed, offset + start + i)
        tr = trace_from_driver(path, escape=resc)
        for jr, r in enumerate(r_list):
            out[i, jr] = minkowski_content(tr, domain, r, grid, params)
    return out


def _path_from_values(params, drv, dt, seed, sample_index):
    from .loewner import DrivingPath

    n = drv.nfill
    times = np.linspace(0.0, n * dt, n + 1)
    return DrivingPath(
        times=times,
        values=drv.values[: n + 1],
        kappa=params.kappa,
        seed=seed,
        sample_index=sample_index,
    )


def integral_lk_bound(
    domain,
    n: int,
    mc_points: int,
    params: SleParams,
    seed: int = 0,
) -> EstimateResult:
    """Monte Carlo value of the dominating integral over D^n.

    integrand: prod_k min_{0 <= j < k} |z_k - z_j|^(d-2) with z_0 = 0.
    Always finite since d > 1; this is the quantity whose finiteness makes
    the content moments finite.
    """
    if n > 4:
        raise ValueError("n above 4 is out of desk scale")
    if mc_points < 10_000:
        raise ValueError("mc_points must be at least 10^4")
    gen = np.random.Generator(np.random.Philox(key=np.array([seed, 0], dtype=np.uint64)))
    zs = np.stack([domain.sample(gen, mc_points) for _ in range(n)], axis=1)
    vals = np.ones(mc_points)
    for k in range(n):
        gaps = np.abs(zs[:, k] - 0.0)
        for j in range(k):
            gaps = np.minimum(gaps, np.abs(zs[:, k] - zs[:, j]))
        vals *= gaps ** (params.d - 2.0)
    scale = domain.area**n
    mean = float(vals.mean()) * scale
    se = float(vals.std(ddof=1) / math.sqrt(mc_points)) * scale
    return EstimateResult(mean=mean, stderr=se, n_samples=mc_points)
