"""Concentric circle families around marked points.

The multi-point hitting bound is proved through a combinatorial object:
quantised circles of radii gap/4^s around each marked point, pruned so the
surviving circles are pairwise disjoint, then partitioned into runs of
concentric circles whose radii form a geometric sequence with ratio 1/4.
This module builds that object constructively and exposes the structural
counts and the per-run bound product so the inequalities relating it to the
plain multi-point bound can be checked numerically.

Indexing convention: marked points are 0-based in code; the count bounds
below are stated with the 1-based position j+1 of the owner.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

from .core import PointConfig, SleParams, p_scaling

__all__ = [
    "Circle",
    "Run",
    "CircleFamily",
    "GeometryInvariantError",
    "quantize_radii",
    "build_circles",
    "prune_conflicts",
    "partition_runs",
    "check_run_counts",
    "circle_family",
    "family_bound_product",
    "skipped_annulus_counts",
]


class GeometryInvariantError(AssertionError):
    """A structural count guaranteed by the construction failed."""


@dataclass(frozen=True)
class Circle:
    """Circle |z - center| = radius around marked point `owner` at level s >= 1."""

    owner: int
    level: int
    center: complex
    radius: float

    def __post_init__(self):
        if self.level < 1 or self.radius <= 0.0:
            raise ValueError("level must be >= 1 and radius positive")
        if abs(self.center) <= self.radius:
            raise ValueError("circle passes through or encloses the origin")


@dataclass(frozen=True)
class Run:
    """Maximal chain of concentric circles with radius ratio 1/4."""

    owner: int
    center: complex
    levels: tuple  # consecutive integers, ascending (radius descending)
    radius_big: float
    radius_small: float

    @property
    def count(self) -> int:
        return len(self.levels)


@dataclass(frozen=True)
class CircleFamily:
    runs: tuple
    circles: tuple  # the pruned circles the runs partition

    def circles_of_run(self, idx: int):
        run = self.runs[idx]
        return [
            c for c in self.circles if c.owner == run.owner and c.level in run.levels
        ]

    def to_records(self):
        """Flat serialisable view: one record per circle with its run id."""
        run_of = {}
        for i, run in enumerate(self.runs):
            for lev in run.levels:
                run_of[(run.owner, lev)] = i
        return [
            {
                "owner": c.owner,
                "level": c.level,
                "center": [c.center.real, c.center.imag],
                "radius": c.radius,
                "run": run_of[(c.owner, c.level)],
            }
            for c in self.circles
        ]

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_records(), **kw)


def quantize_radii(cfg: PointConfig) -> list:
    """Quantisation levels h_j with gap_j / 4^{h_j} <= r_j and h_j >= 1.

    Rounds the radius down to the next power of 1/4 of the gap; points with
    r_j >= gap_j/4 still get one circle (their bound factor is within a
    single 4^alpha step of 1, which the comparison inequalities absorb).
    """
    levels = []
    for r, l in zip(cfg.radii, cfg.gaps):
        ratio = l / r
        if ratio <= 4.0:
            levels.append(1)
        else:
            # tiny slack so exact powers of 4 do not round up through float noise
            levels.append(max(1, math.ceil(math.log(ratio) / math.log(4.0) - 1e-12)))
    return levels


def build_circles(cfg: PointConfig, levels) -> list:
    """All circles gap_j/4^s, s = 1..h_j, before pruning.

    radius <= gap_j/4 <= |z_j|/4 guarantees no circle reaches the origin.
    """
    out = []
    for j, (pt, l, h) in enumerate(zip(cfg.points, cfg.gaps, levels)):
        for s in range(1, h + 1):
            out.append(Circle(owner=j, level=s, center=pt.z, radius=l / 4.0**s))
    return out


def _circle_meets_disk(c: Circle, disk_center: complex, disk_radius: float) -> bool:
    # closed intersection test; tangency counts (conservative pruning)
    return abs(abs(c.center - disk_center) - c.radius) <= disk_radius


def circles_disjoint(a: Circle, b: Circle) -> bool:
    d = abs(a.center - b.center)
    return d > a.radius + b.radius or d < abs(a.radius - b.radius)


def prune_conflicts(circles, cfg: PointConfig) -> list:
    """Drop circles of earlier points that meet a later point's core disk.

    For owners j < k, the core disk around point k has radius gap_k/4; any
    circle of owner j meeting it is removed.  The construction guarantees
    at most one circle per (j, k) pair is removed; more indicates a bug and
    raises GeometryInvariantError.
    """
    removed = set()
    n = cfg.n
    for k in range(1, n):
        dk_center = cfg.points[k].z
        dk_radius = cfg.gaps[k] / 4.0
        for j in range(k):
            hits = [
                c
                for c in circles
                if c.owner == j and _circle_meets_disk(c, dk_center, dk_radius)
            ]
            if len(hits) > 1:
                raise GeometryInvariantError(
                    f"conflict set for pair ({j}, {k}) has {len(hits)} circles"
                )
            removed.update((c.owner, c.level) for c in hits)
    return [c for c in circles if (c.owner, c.level) not in removed]


def partition_runs(circles, cfg: PointConfig) -> CircleFamily:
    """Split a disjoint circle set into concentric geometric runs.

    Within one owner, consecutive levels s, s+1 stay in the same run iff
    the open annulus between their circles contains no other circle of the
    set.  Verifies that the closed run annuli are pairwise disjoint; the
    run-count bounds hold for pipeline-built input and are enforced by
    check_run_counts / circle_family, not here, so that hand-assembled
    families (e.g. a chain with a hole) can still be partitioned.
    """
    n = cfg.n
    circles = list(circles)
    runs = []
    for j in range(n):
        own = sorted((c for c in circles if c.owner == j), key=lambda c: c.level)
        if not own:
            continue
        center = own[0].center
        chains = [[own[0]]]
        for prev, cur in zip(own, own[1:]):
            joined = False
            if cur.level == prev.level + 1:
                rin, rout = cur.radius, prev.radius
                blocked = any(
                    _circle_in_open_annulus(c, center, rin, rout)
                    for c in circles
                    if c is not prev and c is not cur
                )
                joined = not blocked
            if joined:
                chains[-1].append(cur)
            else:
                chains.append([cur])
        for chain in chains:
            runs.append(
                Run(
                    owner=j,
                    center=center,
                    levels=tuple(c.level for c in chain),
                    radius_big=chain[0].radius,
                    radius_small=chain[-1].radius,
                )
            )
    _check_annuli_disjoint(runs)
    return CircleFamily(runs=tuple(runs), circles=tuple(circles))


def check_run_counts(fam: CircleFamily, cfg: PointConfig) -> None:
    """Enforce the per-owner run-count bound |runs_j| <= 1 + 3(n - (j+1)).

    Guaranteed for families produced by the quantise/build/prune/partition
    pipeline; raises GeometryInvariantError otherwise.
    """
    n = cfg.n
    for j in range(n):
        count = sum(1 for r in fam.runs if r.owner == j)
        bound = 1 + 3 * (n - (j + 1))
        if count > bound:
            raise GeometryInvariantError(
                f"owner {j}: {count} runs exceeds bound {bound}"
            )
    total_bound = n + 3 * n * (n - 1) // 2
    if len(fam.runs) > total_bound:
        raise GeometryInvariantError(
            f"{len(fam.runs)} runs exceeds total bound {total_bound}"
        )


def circle_family(cfg: PointConfig):
    """Full construction pipeline with all structural checks enforced.

    Returns (levels, CircleFamily).
    """
    levels = quantize_radii(cfg)
    circles = build_circles(cfg, levels)
    pruned = prune_conflicts(circles, cfg)
    fam = partition_runs(pruned, cfg)
    check_run_counts(fam, cfg)
    skipped_annulus_counts(fam, cfg, levels)
    return levels, fam


def _circle_in_open_annulus(
    c: Circle, center: complex, rin: float, rout: float
) -> bool:
    d = abs(c.center - center)
    return d - c.radius > rin and d + c.radius < rout


def _check_annuli_disjoint(runs):
    for i in range(len(runs)):
        for k in range(i + 1, len(runs)):
            a, b = runs[i], runs[k]
            if not _annuli_disjoint(a, b):
                raise GeometryInvariantError(
                    f"run annuli {i} and {k} intersect"
                )


def _annuli_disjoint(a: Run, b: Run) -> bool:
    d = abs(a.center - b.center)
    if d == 0.0:
        return a.radius_big < b.radius_small or b.radius_big < a.radius_small
    # closed annuli A = [a.small, a.big], B = [b.small, b.big] around two centers
    if d > a.radius_big + b.radius_big:
        return True
    # one annulus entirely inside the other's hole
    if d + a.radius_big < b.radius_small or d + b.radius_big < a.radius_small:
        return True
    return False


def family_bound_product(fam: CircleFamily, p: SleParams) -> float:
    """Product over runs of P_y(smallest radius) / P_y(largest radius)."""
    out = 1.0
    for run in fam.runs:
        y = run.center.imag
        out *= p_scaling(y, run.radius_small, p) / p_scaling(y, run.radius_big, p)
    return out


def skipped_annulus_counts(fam: CircleFamily, cfg: PointConfig, levels) -> list:
    """Per owner: how many scale annuli the run annuli fail to cover.

    The scale annuli of owner j are gap/4^s <= |z-z_j| <= gap/4^{s-1} for
    s = 1..h_j; annulus s is covered iff levels s-1 and s sit in the same
    run.  The construction guarantees at most 1 + 2(n - (j+1)) misses.
    """
    n = cfg.n
    counts = []
    for j in range(n):
        covered = set()
        for run in fam.runs:
            if run.owner != j:
                continue
            for a, b in zip(run.levels, run.levels[1:]):
                if b == a + 1:
                    covered.add(b)
        h = levels[j]
        skipped = h - len(covered)
        bound = 1 + 2 * (n - (j + 1))
        if skipped > bound:
            raise GeometryInvariantError(
                f"owner {j}: {skipped} uncovered annuli exceeds bound {bound}"
            )
        counts.append(skipped)
    return counts
