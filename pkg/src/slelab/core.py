"""Scaling calculus and closed-form hitting bounds for chordal SLE.

Everything in this module is a pure function of its inputs.  The bound
products are *structural*: the theory only pins them down up to
kappa-dependent constants, so all bounds here are returned with that
constant set to 1 and downstream checks compare exponents and ratios,
never absolute normalisations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "SleParams",
    "HalfPlanePoint",
    "PointConfig",
    "MobiusMap",
    "derive_params",
    "p_scaling",
    "p_ratio",
    "green_halfplane",
    "green_domain",
    "multipoint_interior_bound",
    "multipoint_green_upper",
    "boundary_green_upper",
]


@dataclass(frozen=True)
class SleParams:
    """SLE parameter kappa with its derived exponents.

    d     -- fractal dimension of the curve, 1 + kappa/8
    alpha -- boundary hitting exponent, 8/kappa - 1

    The interior hitting exponent is 2 - d; alpha >= 2 - d holds for every
    kappa in (0, 8).
    """

    kappa: float
    d: float
    alpha: float

    @property
    def interior_exponent(self) -> float:
        return 2.0 - self.d


def derive_params(kappa: float) -> SleParams:
    """Build SleParams from kappa, enforcing kappa in (0, 8)."""
    kappa = float(kappa)
    if not (0.0 < kappa < 8.0) or not math.isfinite(kappa):
        raise ValueError(f"kappa must lie in (0, 8), got {kappa}")
    d = 1.0 + kappa / 8.0
    alpha = 8.0 / kappa - 1.0
    p = SleParams(kappa=kappa, d=d, alpha=alpha)
    # alpha >= 2 - d is equivalent to kappa/8 + 8/kappa >= 2 (AM-GM).
    assert p.alpha >= p.interior_exponent - 1e-12
    return p


@dataclass(frozen=True)
class HalfPlanePoint:
    """A point of the closed upper half-plane; im == 0 marks a boundary point."""

    re: float
    im: float

    def __post_init__(self):
        if not (math.isfinite(self.re) and math.isfinite(self.im)):
            raise ValueError("non-finite coordinate")
        if self.im < 0.0:
            raise ValueError(f"point below the real axis: im={self.im}")

    @classmethod
    def of(cls, z) -> "HalfPlanePoint":
        if isinstance(z, HalfPlanePoint):
            return z
        z = complex(z)
        return cls(z.real, z.imag)

    @property
    def z(self) -> complex:
        return complex(self.re, self.im)

    @property
    def is_boundary(self) -> bool:
        return self.im == 0.0


def _as_points(points) -> list[HalfPlanePoint]:
    return [HalfPlanePoint.of(z) for z in points]


@dataclass(frozen=True)
class PointConfig:
    """Marked points z_1..z_n with target radii and derived gaps.

    gaps[k] is the distance from points[k] to the set {0, points[0], ...,
    points[k-1]}; the origin always participates, so gaps[0] = |z_1|.
    """

    points: tuple
    radii: tuple
    gaps: tuple = field(default=None)

    def __post_init__(self):
        pts = tuple(_as_points(self.points))
        radii = tuple(float(r) for r in self.radii)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "radii", radii)
        if len(pts) != len(radii):
            raise ValueError("points and radii must have equal length")
        if any(r <= 0.0 for r in radii):
            raise ValueError("radii must be positive")
        zs = [p.z for p in pts]
        gaps = []
        for k, z in enumerate(zs):
            prev = [0j] + zs[:k]
            g = min(abs(z - w) for w in prev)
            if g == 0.0:
                raise ValueError(
                    "marked points must be distinct and distinct from the origin"
                )
            gaps.append(g)
        object.__setattr__(self, "gaps", tuple(gaps))

    @property
    def n(self) -> int:
        return len(self.points)

    @property
    def zs(self) -> np.ndarray:
        return np.array([p.z for p in self.points], dtype=complex)


@dataclass(frozen=True)
class MobiusMap:
    """Real Moebius map w = (a z + b) / (c z + d) with a d - b c > 0.

    Real coefficients with positive determinant make this an automorphism
    of the upper half-plane, which is the class of domain maps supported
    by green_domain.
    """

    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        if self.det <= 0.0:
            raise ValueError("need a*d - b*c > 0 for a half-plane automorphism")

    @property
    def det(self) -> float:
        return self.a * self.d - self.b * self.c

    def __call__(self, z: complex) -> complex:
        return (self.a * z + self.b) / (self.c * z + self.d)

    def deriv(self, z: complex) -> complex:
        return self.det / (self.c * z + self.d) ** 2

    def inverse(self, w: complex) -> complex:
        return (self.d * w - self.b) / (-self.c * w + self.a)

    def inverse_deriv(self, w: complex) -> complex:
        return self.det / (self.a - self.c * w) ** 2

    @classmethod
    def identity(cls) -> "MobiusMap":
        return cls(1.0, 0.0, 0.0, 1.0)


def p_scaling(y, x, p: SleParams):
    """Two-regime scaling function.

    For gap height y >= 0 this interpolates between the interior decay
    x^(2-d) below scale y and the boundary decay x^alpha above it:

        y^(alpha-(2-d)) * x^(2-d)   for 0 <= x <= y
        x^alpha                     for x >= y

    Both branches agree at x = y and at x = 0 the value is 0.  Accepts
    scalars or numpy arrays (broadcast over x and y).
    """
    scalar = np.isscalar(x) and np.isscalar(y)
    y = np.asarray(y, dtype=float)
    x = np.asarray(x, dtype=float)
    if np.any(y < 0.0) or np.any(x < 0.0):
        raise ValueError("p_scaling requires x >= 0 and y >= 0")
    beta = p.alpha - p.interior_exponent  # >= 0
    ysafe = np.where(y > 0.0, y, 1.0)
    lo = ysafe**beta * x**p.interior_exponent
    hi = x**p.alpha
    out = np.where(x <= y, lo, hi)
    out = np.where(x == 0.0, 0.0, out)
    return float(out) if scalar else out


def p_ratio(y: float, r: float, l: float, p: SleParams) -> float:
    """Single-point bound factor P_y(min(r, l)) / P_y(l), always in (0, 1]."""
    if l <= 0.0:
        raise ValueError("degenerate configuration: gap l must be positive")
    if r <= 0.0:
        raise ValueError("radius must be positive")
    if y < 0.0:
        raise ValueError("height y must be >= 0")
    if r >= l:
        return 1.0
    return p_scaling(y, min(r, l), p) / p_scaling(y, l, p)


def green_halfplane(z, p: SleParams) -> float:
    """One-point Green's function for the half-plane, normalised to C = 1.

    Value Im(z)^(d-2) * sin(arg z)^alpha for interior z; rejects boundary
    and exterior points, where the interior formula does not apply.
    """
    z = HalfPlanePoint.of(z)
    if z.im <= 0.0:
        raise ValueError("green_halfplane is defined for interior points only")
    theta = math.atan2(z.im, z.re)  # in (0, pi) for im > 0
    return z.im ** (p.d - 2.0) * math.sin(theta) ** p.alpha


def green_domain(z, mobius: MobiusMap, p: SleParams) -> float:
    """Green's function pulled to a Moebius image of the half-plane.

    Applies the conformal covariance rule
        G_D(z) = |(F^{-1})'(z)|^(2-d) * G_H(F^{-1}(z))
    for a half-plane automorphism F, again with C = 1.
    """
    z = HalfPlanePoint.of(z).z
    if z.imag <= 0.0:
        raise ValueError("z must be interior to the image domain")
    w = mobius.inverse(z)
    if w.imag <= 0.0:
        raise ValueError("pulled-back point left the upper half-plane")
    dw = mobius.inverse_deriv(z)
    return abs(dw) ** p.interior_exponent * green_halfplane(w, p)


def multipoint_interior_bound(cfg: PointConfig, p: SleParams) -> float:
    """Structural multi-point hitting bound: prod_k P_{y_k}(r_k ^ l_k)/P_{y_k}(l_k).

    The unknown kappa- and n-dependent constant is omitted; the result is
    in (0, 1] and scale-free (multiplying every point and radius by the
    same factor leaves it unchanged).
    """
    out = 1.0
    for pt, r, l in zip(cfg.points, cfg.radii, cfg.gaps):
        out *= p_ratio(pt.im, r, l, p)
    return out


def multipoint_green_upper(cfg: PointConfig, p: SleParams) -> float:
    """Upper-bound product for the interior multi-point Green's function.

    prod_k y_k^(alpha-(2-d)) / P_{y_k}(l_k), constant omitted.  Requires
    every marked point to be interior.
    """
    beta = p.alpha - p.interior_exponent
    out = 1.0
    for pt, l in zip(cfg.points, cfg.gaps):
        if pt.im <= 0.0:
            raise ValueError(
                "interior Green bound needs Im z > 0 for every marked point"
            )
        out *= pt.im**beta / p_scaling(pt.im, l, p)
    return out


def boundary_green_upper(xs, p: SleParams) -> float:
    """Upper-bound product prod_k l_k^(-alpha) for boundary points.

    Gaps use x_0 = 0: l_k = min_{0 <= j < k} |x_k - x_j|.  Coordinates
    must be distinct and nonzero.
    """
    xs = [float(x) for x in xs]
    if any(x == 0.0 for x in xs):
        raise ValueError("boundary points must be nonzero")
    out = 1.0
    for k, x in enumerate(xs):
        prev = [0.0] + xs[:k]
        l = min(abs(x - u) for u in prev)
        if l == 0.0:
            raise ValueError("boundary points must be distinct")
        out *= l**-p.alpha
    return out
