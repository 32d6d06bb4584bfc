"""Umbilical surfaces of L^3 used as supports or as exact solutions.

Three kinds: spacelike planes, hyperbolic planes (one branch) and
pseudospheres.  All pseudosphere formulas are written for the unit
pseudosphere at the origin and transported to S^2_1(p, r) by x -> p + r x.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .lorentz_core import minkowski_inner, time_axis

A = time_axis(3)
TOL_SUPPORT = 1e-9


def _vec(x):
    return np.asarray(x, dtype=float)


@dataclass(frozen=True)
class SpacelikePlane:
    """{x : <x - p, v> = 0} with v unit, timelike and future-directed."""

    p: np.ndarray = field(default_factory=lambda: np.zeros(3))
    v: np.ndarray = field(default_factory=lambda: A.copy())
    kind = "plane"
    epsilon = -1

    def __post_init__(self):
        p, v = _vec(self.p), _vec(self.v)
        q = minkowski_inner(v, v)
        if q >= 0:
            raise ValueError("plane normal must be timelike (the plane must be spacelike)")
        v = v / np.sqrt(-q)
        if minkowski_inner(v, A) > 0:
            v = -v
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "v", v)

    def residual(self, x):
        return minkowski_inner(_vec(x) - self.p, self.v)

    def normal(self, x):
        x = _vec(x)
        return np.broadcast_to(self.v, x.shape).copy()

    def height(self, xy):
        """x3 of the plane above planar point(s) xy."""
        xy = _vec(xy)
        v, p = self.v, self.p
        # <x - p, v> = 0 solved for x3
        return p[2] + ((xy[..., 0] - p[0]) * v[0] + (xy[..., 1] - p[1]) * v[1]) / v[2]

    def height_gradient(self):
        return np.array([self.v[0] / self.v[2], self.v[1] / self.v[2]])

    def to_config(self):
        return {"kind": self.kind, "center": list(map(float, self.p)), "normal": list(map(float, self.v))}


@dataclass(frozen=True)
class HyperbolicPlane:
    """One branch of {<x - p, x - p> = -r^2}; branch +1 lies above p, -1 below."""

    p: np.ndarray = field(default_factory=lambda: np.zeros(3))
    r: float = 1.0
    branch: int = 1
    kind = "hyperbolic"
    epsilon = -1

    def __post_init__(self):
        if self.r <= 0:
            raise ValueError("radius must be positive")
        if self.branch not in (1, -1):
            raise ValueError("branch must be +1 or -1")
        object.__setattr__(self, "p", _vec(self.p))
        object.__setattr__(self, "r", float(self.r))

    def residual(self, x):
        x = _vec(x)
        d = x - self.p
        res = minkowski_inner(d, d) + self.r**2
        wrong = self.branch * d[..., 2] < 0
        return np.where(wrong, np.inf, res)

    def normal(self, x):
        return self.branch * (_vec(x) - self.p) / self.r

    def height(self, xy):
        xy = _vec(xy)
        rho2 = (xy[..., 0] - self.p[0]) ** 2 + (xy[..., 1] - self.p[1]) ** 2
        return self.p[2] + self.branch * np.sqrt(self.r**2 + rho2)

    def to_config(self):
        return {"kind": self.kind, "center": list(map(float, self.p)), "radius": self.r, "branch": self.branch}


@dataclass(frozen=True)
class Pseudosphere:
    """S^2_1(p, r) = {<x - p, x - p> = r^2}; timelike, outward unit normal."""

    p: np.ndarray = field(default_factory=lambda: np.zeros(3))
    r: float = 1.0
    kind = "pseudosphere"
    epsilon = 1

    def __post_init__(self):
        if self.r <= 0:
            raise ValueError("radius must be positive")
        object.__setattr__(self, "p", _vec(self.p))
        object.__setattr__(self, "r", float(self.r))

    def residual(self, x):
        d = _vec(x) - self.p
        return minkowski_inner(d, d) - self.r**2

    def normal(self, x):
        return (_vec(x) - self.p) / self.r

    def to_unit(self, x):
        return (_vec(x) - self.p) / self.r

    def from_unit(self, y):
        return self.p + self.r * _vec(y)

    def to_config(self):
        return {"kind": self.kind, "center": list(map(float, self.p)), "radius": self.r}


SupportSurface = SpacelikePlane | HyperbolicPlane | Pseudosphere


def support_from_config(cfg: dict):
    kind = str(cfg["kind"]).lower()
    center = np.asarray(cfg.get("center", [0.0, 0.0, 0.0]), dtype=float)
    if kind == "plane":
        return SpacelikePlane(center, np.asarray(cfg.get("normal", [0.0, 0.0, 1.0]), dtype=float))
    if kind == "hyperbolic":
        return HyperbolicPlane(center, float(cfg.get("radius", 1.0)), int(cfg.get("branch", 1)))
    if kind == "pseudosphere":
        return Pseudosphere(center, float(cfg.get("radius", 1.0)))
    raise ValueError(f"unknown support kind {kind!r}")


def on_surface(S, x, tol: float = TOL_SUPPORT) -> bool:
    res = np.abs(S.residual(x))
    scale = 1.0 if S.kind == "plane" else S.r**2
    return bool(np.all(res <= tol * max(1.0, scale)))


def surface_normal(S, x, tol: float = 1e-8):
    """Unit normal of S at x: future-directed for spacelike S, outward for the pseudosphere."""
    if not on_surface(S, x, tol):
        raise ValueError("point is not on the support surface")
    return S.normal(x)


def mean_curvature_analytic(S):
    """Mean curvature with future-directed orientation; None for the (timelike) pseudosphere."""
    if S.kind == "plane":
        return 0.0
    if S.kind == "hyperbolic":
        return S.branch / S.r
    return None


# -- pseudosphere geometry (unit, centred at the origin) ---------------------


def geodesic_param(t, q, tol: float = 1e-9):
    """F(t, q) = cosh(t) q + sinh(t) a for q on the waist circle C."""
    t = np.asarray(t, dtype=float)
    q = _vec(q)
    if np.any(np.abs(q[..., 2]) > tol) or np.any(np.abs(minkowski_inner(q, q) - 1) > tol):
        raise ValueError("q must lie on the waist of the unit pseudosphere")
    return np.cosh(t)[..., None] * q + np.sinh(t)[..., None] * A


def geodesic_velocity(t, q):
    t = np.asarray(t, dtype=float)
    return np.sinh(t)[..., None] * _vec(q) + np.cosh(t)[..., None] * A


def waist_point(phi):
    phi = np.asarray(phi, dtype=float)
    return np.stack([np.cos(phi), np.sin(phi), np.zeros_like(phi)], axis=-1)


def geodesic_coordinates(x):
    """Inverse of F on the unit pseudosphere: returns (t, phi)."""
    x = _vec(x)
    return np.arcsinh(x[..., 2]), np.arctan2(x[..., 1], x[..., 0])


def _check_unit_pseudosphere(p, tol):
    if np.any(np.abs(minkowski_inner(p, p) - 1) > tol):
        raise ValueError("point is not on the unit pseudosphere")


def project_pi(p, tol: float = 1e-9):
    """Orthogonal projection of the unit pseudosphere onto its waist."""
    p = _vec(p)
    _check_unit_pseudosphere(p, tol)
    w = minkowski_inner(p, A)
    return (p + w[..., None] * A) / np.sqrt(1 + w * w)[..., None]


def project_pi_differential(p, v, tol: float = 1e-8):
    """Derivative of :func:`project_pi` at p applied to a tangent vector v."""
    p, v = _vec(p), _vec(v)
    _check_unit_pseudosphere(p, tol)
    scale = np.sqrt(np.sum(v * v, axis=-1)) + 1.0
    if np.any(np.abs(minkowski_inner(p, v)) > tol * scale):
        raise ValueError("v is not tangent to the pseudosphere at p")
    w = minkowski_inner(p, A)[..., None]
    va = minkowski_inner(v, A)[..., None]
    s = np.sqrt(1 + w * w)
    big_pi = p + w * A
    return (v + va * A) / s - w * va * big_pi / s**3


def affine_to_unit(S: Pseudosphere, M):
    """Express a plane or hyperbolic plane in the frame where S is the unit pseudosphere."""
    if M.kind == "plane":
        return SpacelikePlane((M.p - S.p) / S.r, M.v)
    if M.kind == "hyperbolic":
        return HyperbolicPlane((M.p - S.p) / S.r, M.r / S.r, M.branch)
    raise ValueError("only spacelike planes and hyperbolic planes meet a pseudosphere in a spacelike curve")


def analytic_contact_angle(M, S: Pseudosphere | None = None) -> float:
    """Constant value of <N, N_S> along M intersected with a pseudosphere.

    N is the future-directed normal of M, N_S the outward normal of S.
    """
    S = S if S is not None else Pseudosphere()
    Mu = affine_to_unit(S, M)
    if not intersection_exists(Mu):
        raise ValueError("surface does not meet the pseudosphere")
    if Mu.kind == "plane":
        return float(minkowski_inner(Mu.p, Mu.v))
    pp = float(minkowski_inner(Mu.p, Mu.p))
    return Mu.branch * (1 - Mu.r**2 - pp) / (2 * Mu.r)


def cap_boundary_height(c: float, r: float) -> float:
    """Height of the circle where H^2((0,0,c), r) meets the unit pseudosphere."""
    if c == 0:
        raise ValueError("c must be nonzero")
    return (c * c - r * r - 1) / (2 * c)


def _level(Mu, X):
    """Signed level function of Mu (zero on Mu), vectorised over points."""
    if Mu.kind == "plane":
        return minkowski_inner(X - Mu.p, Mu.v)
    d = X - Mu.p
    return minkowski_inner(d, d) + Mu.r**2


def _roots_on_geodesic(Mu, phi, t_max=12.0, n_scan=481):
    q = waist_point(phi)
    ts = np.linspace(-t_max, t_max, n_scan)
    vals = _level(Mu, np.cosh(ts)[:, None] * q + np.sinh(ts)[:, None] * A)

    def g(t):
        return float(_level(Mu, np.cosh(t) * q + np.sinh(t) * A))

    roots = list(ts[:-1][vals[:-1] == 0])
    for i in np.flatnonzero(vals[:-1] * vals[1:] < 0):
        roots.append(brentq(g, ts[i], ts[i + 1], xtol=1e-15, rtol=1e-15, maxiter=200))
    if Mu.kind == "hyperbolic":
        roots = [t for t in roots if Mu.branch * (np.sinh(t) - Mu.p[2]) >= 0]
    return sorted(roots)


def intersection_exists(Mu) -> bool:
    if Mu.kind == "plane":
        return True
    return all(len(_roots_on_geodesic(Mu, phi)) > 0 for phi in (0.0, np.pi / 2, np.pi, 1.5 * np.pi))


def sample_intersection(M, n: int, S: Pseudosphere | None = None):
    """Points of M meeting S, one per waist direction, found by root finding along geodesics.

    Returns ``(points, phi)``; points are in the original (not unit) frame.
    """
    S = S if S is not None else Pseudosphere()
    Mu = affine_to_unit(S, M)
    phi = 2 * np.pi * np.arange(n) / n
    ts = np.empty(n)
    for k, ph in enumerate(phi):
        roots = _roots_on_geodesic(Mu, ph)
        if len(roots) != 1:
            raise ValueError(f"intersection is not a geodesic graph (direction {ph:.4f}: {len(roots)} roots)")
        ts[k] = roots[0]
    pts = geodesic_param(ts, waist_point(phi))
    return S.from_unit(pts), phi


def plane_through(height: float = 0.0, slope=(0.0, 0.0)):
    """Spacelike plane x3 = height + slope . (x1, x2)."""
    s = np.asarray(slope, dtype=float)
    if np.dot(s, s) >= 1:
        raise ValueError("|slope| must be < 1 for a spacelike plane")
    # metric flip of the Euclidean gradient (-s, 1), then made future-directed
    return SpacelikePlane(np.array([0.0, 0.0, height]), np.array([s[0], s[1], 1.0]))


# -- polar charts of the supports ------------------------------------------------
#
# Every support is parametrised by (a, phi) with phi the polar angle about a
# planar centre c:  pseudosphere a = geodesic height t (planar radius r cosh t),
# hyperbolic plane and plane a = planar radius.  The solver slides boundary
# vertices in these charts, so they never leave the support.


def _chart_center(S, center):
    return S.p[:2] if center is None else np.asarray(center, dtype=float)


def chart_point(S, a, phi, center=None):
    """Point of S with chart coordinates (a, phi) and the partials d/da, d/dphi."""
    a = np.asarray(a, dtype=float)
    phi = np.asarray(phi, dtype=float)
    c = _chart_center(S, center)
    cs, sn = np.cos(phi), np.sin(phi)
    if S.kind == "pseudosphere":
        R, dR = S.r * np.cosh(a), S.r * np.sinh(a)
        h, dh = S.p[2] + S.r * np.sinh(a), S.r * np.cosh(a)
    elif S.kind == "hyperbolic":
        R, dR = a, np.ones_like(a)
        root = np.sqrt(S.r**2 + a * a)
        h, dh = S.p[2] + S.branch * root, S.branch * a / root
    else:
        R, dR = a, np.ones_like(a)
    X = np.stack([c[0] + R * cs, c[1] + R * sn, np.zeros_like(R)], axis=-1)
    dXa = np.stack([dR * cs, dR * sn, np.zeros_like(R)], axis=-1)
    dXp = np.stack([-R * sn, R * cs, np.zeros_like(R)], axis=-1)
    if S.kind == "plane":
        X[..., 2] = S.height(X[..., :2])
        s = S.height_gradient()
        dXa[..., 2] = dXa[..., :2] @ s
        dXp[..., 2] = dXp[..., :2] @ s
    else:
        X[..., 2] = h
        dXa[..., 2] = dh
    return X, dXa, dXp


def chart_coords(S, X, center=None):
    """Inverse of :func:`chart_point` (phi in (-pi, pi])."""
    X = _vec(X)
    c = _chart_center(S, center)
    d = X[..., :2] - c
    phi = np.arctan2(d[..., 1], d[..., 0])
    if S.kind == "pseudosphere":
        return np.arcsinh((X[..., 2] - S.p[2]) / S.r), phi
    return np.hypot(d[..., 0], d[..., 1]), phi
