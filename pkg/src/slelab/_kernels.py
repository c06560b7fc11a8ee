"""Numerical kernels for the Loewner engine.

Two families of kernels live here:

* exact trace kernels -- the inverse slit-map composition that turns a
  discrete driver into trace vertices.  Evaluating vertex k costs O(k)
  map applications, so a full trace costs O(N^2); these kernels are the
  reference engine and are practical up to a few 10^4 steps.

* forward flow kernels -- push probe points through the forward Loewner
  evolution with exact per-step slit maps, tracking |g'| so the conformal
  radius of each probe is available at any time.  A dyadic block tree over
  the driver lets far probes absorb long driver stretches through a single
  capacity-matched slit map, which brings the per-probe cost down from
  O(steps) to roughly O(log steps) away from close approaches.  This is
  what makes large hitting-probability ensembles affordable.

All square roots are taken with the upper-half-plane branch; ties on the
real axis keep the sign of Re(w - W) so boundary points stay on their side
of the singularity.
"""

import math

import numpy as np

try:
    import numba as nb

    HAVE_NUMBA = True

    def _jit(func):
        return nb.njit(cache=True, nogil=True)(func)

except Exception:  # pragma: no cover - exercised only without numba
    HAVE_NUMBA = False

    def _jit(func):
        return func


# ---------------------------------------------------------------------------
# exact trace kernels
# ---------------------------------------------------------------------------


@_jit
def trace_vertices(values, dt, resc, out_re, out_im):
    """Trace vertices by inverse slit-map composition.

    values : driver at the grid times, length N+1, values[0] == 0
    resc   : stop once |vertex| > resc (ignored if resc <= 0)
    out_*  : preallocated length N+1; vertex 0 is the origin

    Returns (n_vertices, status): status 0 = ran to the end, 1 = escaped,
    2 = branch violation (vertex dropped below the real axis).
    """
    n = values.shape[0] - 1
    out_re[0] = 0.0
    out_im[0] = 0.0
    fourdt = 4.0 * dt
    nv = 0
    for k in range(1, n + 1):
        u = complex(values[k] - values[k - 1], 0.0)
        s = np.sqrt(u * u - fourdt)
        if s.imag < 0.0:
            s = -s
        if s.imag == 0.0 and u.real < 0.0:
            s = -s
        w = values[k - 1] + s
        for j in range(k - 2, -1, -1):
            u = w - values[j]
            s = np.sqrt(u * u - fourdt)
            if s.imag < 0.0:
                s = -s
            if s.imag == 0.0 and u.real < 0.0:
                s = -s
            w = values[j] + s
        if w.imag < -1e-12:
            return nv, 2
        out_re[k] = w.real
        out_im[k] = w.imag
        nv = k
        if resc > 0.0 and w.real * w.real + w.imag * w.imag > resc * resc:
            return nv, 1
    return nv, 0


@_jit
def trace_scan(values, dt, resc, px, py, mins):
    """Trace generation fused with exact polyline distance tracking.

    Vertices are not stored; for each probe (px, py) the running minimum
    distance to the polyline (all segments, endpoints included) is kept in
    mins, which must be initialised to the distance to the origin.

    Returns (n_vertices, status) as in trace_vertices.
    """
    n = values.shape[0] - 1
    np_pts = px.shape[0]
    fourdt = 4.0 * dt
    ax = 0.0
    ay = 0.0
    nv = 0
    for k in range(1, n + 1):
        u = complex(values[k] - values[k - 1], 0.0)
        s = np.sqrt(u * u - fourdt)
        if s.imag < 0.0:
            s = -s
        if s.imag == 0.0 and u.real < 0.0:
            s = -s
        w = values[k - 1] + s
        for j in range(k - 2, -1, -1):
            u = w - values[j]
            s = np.sqrt(u * u - fourdt)
            if s.imag < 0.0:
                s = -s
            if s.imag == 0.0 and u.real < 0.0:
                s = -s
            w = values[j] + s
        if w.imag < -1e-12:
            return nv, 2
        bx = w.real
        by = w.imag
        ex = bx - ax
        ey = by - ay
        ee = ex * ex + ey * ey
        for i in range(np_pts):
            qx = px[i] - ax
            qy = py[i] - ay
            if ee > 0.0:
                t = (qx * ex + qy * ey) / ee
                if t < 0.0:
                    t = 0.0
                elif t > 1.0:
                    t = 1.0
            else:
                t = 0.0
            dx = qx - t * ex
            dy = qy - t * ey
            d = math.sqrt(dx * dx + dy * dy)
            if d < mins[i]:
                mins[i] = d
        ax = bx
        ay = by
        nv = k
        if resc > 0.0 and bx * bx + by * by > resc * resc:
            return nv, 1
    return nv, 0


# ---------------------------------------------------------------------------
# forward flow kernels
# ---------------------------------------------------------------------------


@_jit
def flow_exact(values, dt, z, delta):
    """Forward Loewner flow of one interior point, exact per-step maps.

    Returns (g_T(z), |g_T'(z)|, blow_step); blow_step is the first grid
    index where |g_t(z) - V_t| < delta (or the point hit the real axis),
    -1 if the flow survives to the end.
    """
    w = z
    dabs = 1.0
    fourdt = 4.0 * dt
    n = values.shape[0] - 1
    for j in range(n):
        u = w - values[j]
        au = abs(u)
        if au < delta:
            return w, dabs, j
        s = np.sqrt(u * u + fourdt)
        if s.imag < 0.0:
            s = -s
        if s.imag == 0.0 and u.real < 0.0:
            s = -s
        dabs *= au / abs(s)
        w = values[j] + s
        if w.imag <= 0.0 and z.imag > 0.0:
            return w, dabs, j
    if abs(w - values[n]) < delta:
        return w, dabs, n
    return w, dabs, -1


@_jit
def flow_many(
    values,
    nfill,
    dt,
    eta,
    l0,
    nlev,
    means,
    lows,
    highs,
    offs,
    heights,
    pos,
    wri,
    dab,
    latch,
    state,
    stop,
):
    """Resumable blocked forward flow of many probes.

    State per probe p: pos[p] (next step index), wri[p] (current g_t(z)),
    dab[p] (|g_t'(z)|), state[p] (1 = active, 0 = latched, i.e. the
    conformal gauge Im(w)/|g'| dropped to latch[p]).

    Probes walk to min(stop, nfill).  Block tree arrays hold, per dyadic
    driver block, the mean / min / max driver value; a block of 2^lev
    steps is applied as one capacity-matched slit map whenever the probe
    is at least eta * reach away from its driver footprint.

    Returns the smallest step position at which any probe latched during
    this call (or -1).
    """
    fourdt = 4.0 * dt
    limit = stop if stop < nfill else nfill
    first_latch = -1
    for p in range(pos.shape[0]):
        if state[p] == 0:
            continue
        w = wri[p]
        d = dab[p]
        t = pos[p]
        lat = latch[p]
        while t < limit:
            if w.imag <= lat * d:
                state[p] = 0
                break
            applied = False
            # largest aligned dyadic block at this position
            if t == 0:
                align = l0 + nlev - 1
            else:
                align = 0
                tt = t
                while tt & 1 == 0 and align < l0 + nlev - 1:
                    align += 1
                    tt >>= 1
            lev = align
            if lev > l0 + nlev - 1:
                lev = l0 + nlev - 1
            while lev >= l0:
                size = 1 << lev
                if t + size <= limit:
                    li = lev - l0
                    bi = offs[li] + (t >> lev)
                    if bi < offs[li + 1]:
                        wm = means[bi]
                        reach = highs[bi] - wm
                        r2 = wm - lows[bi]
                        if r2 > reach:
                            reach = r2
                        u = w - wm
                        if abs(u) >= eta * reach + 6.0 * heights[li]:
                            s = np.sqrt(u * u + fourdt * size)
                            if s.imag < 0.0:
                                s = -s
                            d *= abs(u) / abs(s)
                            w = wm + s
                            t += size
                            applied = True
                            break
                lev -= 1
            if not applied:
                u = w - values[t]
                au = abs(u)
                if au < 1e-13:
                    w = complex(w.real, 0.0)
                else:
                    s = np.sqrt(u * u + fourdt)
                    if s.imag < 0.0:
                        s = -s
                    if s.imag == 0.0 and u.real < 0.0:
                        s = -s
                    d *= au / abs(s)
                    w = values[t] + s
                t += 1
                if w.imag <= 0.0:
                    w = complex(w.real, 0.0)
                    state[p] = 0
                    break
        if state[p] == 0 and (first_latch < 0 or t < first_latch):
            first_latch = t
        if state[p] == 1 and w.imag <= lat * d:
            state[p] = 0
            if first_latch < 0 or t < first_latch:
                first_latch = t
        pos[p] = t
        wri[p] = w
        dab[p] = d
    return first_latch


@_jit
def _fill_tree(values, nfill, l0, offs, means, lows, highs):
    nlev = offs.shape[0] - 1
    if nlev <= 0:
        return
    # base level from the raw driver values
    size = 1 << l0
    nb0 = nfill >> l0
    for i in range(nb0):
        base = i << l0
        s = 0.0
        lo = values[base]
        hi = values[base]
        for j in range(base, base + size):
            v = values[j]
            s += v
            if v < lo:
                lo = v
            if v > hi:
                hi = v
        means[i] = s / size
        lows[i] = lo
        highs[i] = hi
    # upper levels from children
    for li in range(1, nlev):
        nb_ = nfill >> (l0 + li)
        dst = offs[li]
        src = offs[li - 1]
        for i in range(nb_):
            a = src + 2 * i
            b = a + 1
            means[dst + i] = 0.5 * (means[a] + means[b])
            lows[dst + i] = min(lows[a], lows[b])
            highs[dst + i] = max(highs[a], highs[b])


def build_block_tree(values, nfill, dt, l0=4, max_levels=32):
    """Dyadic summaries (mean/min/max driver value) over the first nfill steps.

    Step j carries driver value values[j] (left endpoint convention).
    Returns flat arrays plus per-level offsets and hull-height paddings,
    ready for flow_many.  Levels run l0 .. l0+nlev-1.
    """
    nlev = 0
    while (1 << (l0 + nlev)) <= max(nfill, 1) and nlev < max_levels:
        if nfill >> (l0 + nlev) == 0:
            break
        nlev += 1
    if nlev == 0:
        empty = np.zeros(0)
        return empty, empty.copy(), empty.copy(), np.zeros(1, dtype=np.int64), empty.copy(), l0, 0
    offs = np.zeros(nlev + 1, dtype=np.int64)
    for i in range(nlev):
        offs[i + 1] = offs[i] + (nfill >> (l0 + i))
    total = int(offs[-1])
    means = np.empty(total)
    lows = np.empty(total)
    highs = np.empty(total)
    _fill_tree(np.asarray(values), nfill, l0, offs, means, lows, highs)
    heights = np.array(
        [3.0 * math.sqrt((1 << (l0 + i)) * dt) for i in range(nlev)]
    )
    return means, lows, highs, offs, heights, l0, nlev


_EMPTY_TREE_CACHE = {}


def flow_gauges(
    values,
    nfill,
    dt,
    probes,
    latches,
    eta=8.0,
    stop=None,
    tree=None,
    state=None,
):
    """Final conformal gauges Im(g w)/|g'| for a batch of probes.

    Convenience wrapper around flow_many for a fully materialised driver.
    Returns (gauges, latched_mask).
    """
    probes = np.asarray(probes, dtype=complex)
    n_p = probes.shape[0]
    if stop is None:
        stop = nfill
    if tree is None:
        tree = build_block_tree(values, nfill, dt)
    means, lows, highs, offs, heights, l0, nlev = tree
    pos = np.zeros(n_p, dtype=np.int64)
    wri = probes.copy()
    dab = np.ones(n_p)
    st = np.ones(n_p, dtype=np.int8)
    lat = np.asarray(latches, dtype=float)
    flow_many(
        np.asarray(values),
        nfill,
        dt,
        eta,
        l0,
        nlev,
        means,
        lows,
        highs,
        offs,
        heights,
        pos,
        wri,
        dab,
        lat,
        st,
        stop,
    )
    gauges = np.where(dab > 0, wri.imag / np.maximum(dab, 1e-300), 0.0)
    latched = st == 0
    gauges = np.where(latched, np.minimum(gauges, lat), gauges)
    return gauges, latched
