"""Triangulated spacelike graphs over planar discs and annuli.

A :class:`SpacelikeGraph` stores 3D vertex positions ``(x1, x2, u)``; the
planar part is the domain triangulation and ``u`` the height.  Meshes built
here are polar: ``n_rings`` rings times ``n_sectors`` sectors, with every
ring a closed vertex cycle.  The polar layout is recorded so the solver can
move boundary vertices along rays and boundary normals can use second-order
one-sided stencils.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from . import kernels
from .lorentz_core import BoundaryFrame, lorentz_cross, minkowski_inner, normalize, time_axis
from .umbilic import on_surface

A = time_axis(3)
DELTA_SPACE = 1e-3
TOL_SUPPORT = 1e-8


class SpacelikeViolation(ValueError):
    def __init__(self, triangle: int, grad_norm: float, bound: float):
        super().__init__(
            f"triangle {triangle} has |grad u| = {grad_norm:.6g} > {bound:.6g} (not spacelike)"
        )
        self.triangle = triangle
        self.grad_norm = grad_norm


class DegenerateMesh(ValueError):
    pass


@dataclass(frozen=True)
class PolarLayout:
    """Index bookkeeping for rings x sectors meshes.

    For a disc, vertex 0 is the centre and ring j (1..n_rings) holds
    ``1 + (j - 1) * n_sectors + k``.  For an annulus ring j (0..n_rings) holds
    ``j * n_sectors + k``.  ``fractions[j]`` is the relative radial position
    of ring j between the inner edge (centre or inner circle) and the boundary.
    """

    kind: str
    n_rings: int
    n_sectors: int
    center: np.ndarray
    angles: np.ndarray
    fractions: np.ndarray

    def ring(self, j: int) -> np.ndarray:
        k = np.arange(self.n_sectors)
        if self.kind == "disc":
            if j == 0:
                return np.zeros(1, dtype=np.int64)
            return 1 + (j - 1) * self.n_sectors + k
        return j * self.n_sectors + k

    @property
    def n_vertices(self) -> int:
        if self.kind == "disc":
            return 1 + self.n_rings * self.n_sectors
        return (self.n_rings + 1) * self.n_sectors


@dataclass(frozen=True, eq=False)
class SpacelikeGraph:
    points: np.ndarray
    triangles: np.ndarray
    boundary: np.ndarray
    inner_boundary: np.ndarray | None = None
    support: object | None = None
    layout: PolarLayout | None = None
    delta_space: float = DELTA_SPACE
    interior: np.ndarray = field(init=False)

    def __post_init__(self):
        pts = np.ascontiguousarray(self.points, dtype=float)
        tri = np.ascontiguousarray(self.triangles, dtype=np.int64)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "triangles", tri)
        object.__setattr__(self, "boundary", np.asarray(self.boundary, dtype=np.int64))
        on_bdry = np.zeros(len(pts), dtype=bool)
        on_bdry[self.boundary] = True
        if self.inner_boundary is not None:
            object.__setattr__(self, "inner_boundary", np.asarray(self.inner_boundary, dtype=np.int64))
            on_bdry[self.inner_boundary] = True
        object.__setattr__(self, "interior", np.flatnonzero(~on_bdry))
        pts.setflags(write=False)
        self.validate()

    # -- convenience -------------------------------------------------------
    @property
    def xy(self) -> np.ndarray:
        return self.points[:, :2]

    @property
    def heights(self) -> np.ndarray:
        return self.points[:, 2]

    @property
    def n_vertices(self) -> int:
        return len(self.points)

    def with_points(self, points, support="keep") -> "SpacelikeGraph":
        sup = self.support if support == "keep" else support
        return replace(self, points=np.array(points, dtype=float), support=sup)

    def with_heights(self, u) -> "SpacelikeGraph":
        pts = self.points.copy()
        pts[:, 2] = u
        return self.with_points(pts)

    def diameter(self) -> float:
        xy = self.xy
        return float(2 * np.max(np.linalg.norm(xy - xy.mean(axis=0), axis=1)))

    # -- checks ------------------------------------------------------------
    def validate(self):
        areas = planar_areas(self.points, self.triangles)
        if np.any(areas <= 1e-14 * max(1.0, float(np.max(np.abs(areas))))):
            bad = int(np.argmin(areas))
            raise DegenerateMesh(f"triangle {bad} is degenerate or inverted (planar area {areas[bad]:.3g})")
        s2 = gradient_norm2(self.points, self.triangles)
        bound = 1.0 - self.delta_space
        worst = int(np.argmax(s2))
        if not np.all(np.isfinite(s2)) or s2[worst] > bound * bound:
            raise SpacelikeViolation(worst, float(np.sqrt(s2[worst])), bound)
        if self.support is not None:
            if not on_surface(self.support, self.points[self.boundary], TOL_SUPPORT):
                raise ValueError("boundary vertices are not on the support surface")


def planar_areas(points, tri):
    p = points
    e1 = p[tri[:, 1], :2] - p[tri[:, 0], :2]
    e2 = p[tri[:, 2], :2] - p[tri[:, 0], :2]
    return 0.5 * (e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])


def gradient_norm2(points, tri):
    e1 = points[tri[:, 1]] - points[tri[:, 0]]
    e2 = points[tri[:, 2]] - points[tri[:, 0]]
    twice = e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0]
    gx = (e1[:, 2] * e2[:, 1] - e2[:, 2] * e1[:, 1]) / twice
    gy = (e2[:, 2] * e1[:, 0] - e1[:, 2] * e2[:, 0]) / twice
    return gx * gx + gy * gy


# -- domain construction -------------------------------------------------------


def _strip_triangles(inner, outer):
    """Triangles between two closed rings with the same number of sectors, all diagonals alike."""
    ns = len(inner)
    k = np.arange(ns)
    k1 = (k + 1) % ns
    t1 = np.stack([inner[k], outer[k], outer[k1]], axis=1)
    t2 = np.stack([inner[k], outer[k1], inner[k1]], axis=1)
    return np.concatenate([t1, t2])


def polar_disc(radius: float = 1.0, n_rings: int = 32, n_sectors: int | None = None, center=(0.0, 0.0)):
    """Planar polar disc: returns (xy, triangles, layout)."""
    if n_rings < 1:
        raise ValueError("need at least one ring")
    ns = n_sectors if n_sectors is not None else default_sectors(n_rings)
    if ns < 3:
        raise ValueError("need at least three sectors")
    c = np.asarray(center, dtype=float)
    angles = 2 * np.pi * np.arange(ns) / ns
    fr = np.arange(n_rings + 1) / n_rings
    layout = PolarLayout("disc", n_rings, ns, c, angles, fr)
    xy = np.empty((layout.n_vertices, 2))
    xy[0] = c
    dirs = np.stack([np.cos(angles), np.sin(angles)], axis=1)
    for j in range(1, n_rings + 1):
        xy[layout.ring(j)] = c + radius * fr[j] * dirs
    k = np.arange(ns)
    r1 = layout.ring(1)
    tris = [np.stack([np.zeros(ns, dtype=np.int64), r1[k], r1[(k + 1) % ns]], axis=1)]
    for j in range(1, n_rings):
        tris.append(_strip_triangles(layout.ring(j), layout.ring(j + 1)))
    return xy, np.concatenate(tris).astype(np.int64), layout


def polar_annulus(r_in: float, r_out: float, n_rings: int = 32, n_sectors: int | None = None, center=(0.0, 0.0)):
    if not 0 < r_in < r_out:
        raise ValueError("need 0 < r_in < r_out")
    ns = n_sectors if n_sectors is not None else default_sectors(n_rings)
    c = np.asarray(center, dtype=float)
    angles = 2 * np.pi * np.arange(ns) / ns
    fr = np.arange(n_rings + 1) / n_rings
    layout = PolarLayout("annulus", n_rings, ns, c, angles, fr)
    dirs = np.stack([np.cos(angles), np.sin(angles)], axis=1)
    xy = np.empty((layout.n_vertices, 2))
    for j in range(n_rings + 1):
        xy[layout.ring(j)] = c + (r_in + (r_out - r_in) * fr[j]) * dirs
    tris = [_strip_triangles(layout.ring(j), layout.ring(j + 1)) for j in range(n_rings)]
    return xy, np.concatenate(tris).astype(np.int64), layout


def default_sectors(n_rings: int) -> int:
    return max(8, 4 * n_rings)


def build_graph(domain, height, support=None, delta_space: float = DELTA_SPACE) -> SpacelikeGraph:
    """Lift a polar domain to a spacelike graph.

    ``domain`` is the tuple returned by :func:`polar_disc` or
    :func:`polar_annulus`; ``height`` is a callable ``u(x1, x2)``, a constant or an
    array of vertex heights.
    """
    xy, tri, layout = domain
    if callable(height):
        u = np.asarray(height(xy[:, 0], xy[:, 1]), dtype=float) * np.ones(len(xy))
    elif np.ndim(height) == 0:
        u = np.full(len(xy), float(height))
    else:
        u = np.asarray(height, dtype=float)
        if u.shape != (len(xy),):
            raise ValueError("height array does not match the vertex count")
    if not np.all(np.isfinite(u)):
        raise ValueError("heights must be finite")
    pts = np.column_stack([xy, u])
    boundary = layout.ring(layout.n_rings)
    inner = layout.ring(0) if layout.kind == "annulus" else None
    return SpacelikeGraph(pts, tri, boundary, inner, support, layout, delta_space)


# -- geometry ----------------------------------------------------------------


def barycentric_masses(points, tri) -> np.ndarray:
    areas = planar_areas(points, tri)
    m = np.zeros(len(points))
    np.add.at(m, tri.ravel(), np.repeat(areas / 3.0, 3))
    return m


def fan_dual_area(points, center: int, ring) -> float:
    """Circumcentric dual-cell area of a fan centre (cotangent formula, planar)."""
    c = points[center, :2]
    P = points[ring, :2]
    Q = np.roll(P, -1, axis=0)
    e1, e2 = P - c, Q - c

    def cot(u, v):
        return np.einsum("ij,ij->i", u, v) / np.abs(u[:, 0] * v[:, 1] - u[:, 1] * v[:, 0])

    cot_at_P = cot(c - P, Q - P)
    cot_at_Q = cot(c - Q, P - Q)
    return float(np.sum(np.sum(e1 * e1, 1) * cot_at_Q + np.sum(e2 * e2, 1) * cot_at_P) / 8.0)


def center_mass_defect(g: SpacelikeGraph) -> float:
    """Barycentric minus dual mass of a polar disc centre; zero for other meshes.

    The lumped finite-element stencil at a fan centre with many thin triangles
    is inconsistent (it returns 3/(2 cos^2(pi/n)) times the Laplacian of a
    quadratic); the dual-cell mass restores consistency.
    """
    lay = g.layout
    if lay is None or lay.kind != "disc":
        return 0.0
    m0 = barycentric_masses(g.points, g.triangles)[0]
    return m0 - fan_dual_area(g.points, 0, lay.ring(1))


def vertex_masses(g: SpacelikeGraph) -> np.ndarray:
    """Planar vertex masses: a third of the star area, dual cell at a polar centre."""
    m = barycentric_masses(g.points, g.triangles)
    m[0] -= center_mass_defect(g)
    return m


def future_normal(g: SpacelikeGraph) -> np.ndarray:
    """Area-weighted vertex normals, unit and future-directed."""
    acc = kernels.face_normal_sum(g.points, g.triangles, g.n_vertices)
    return normalize(acc)


def mean_curvature(g: SpacelikeGraph) -> np.ndarray:
    """Discrete H at interior vertices (ordered as ``g.interior``).

    2H is the lumped finite-element value of div(grad u / sqrt(1 - |grad u|^2)),
    which equals dA/du_i divided by the vertex mass.  Caps of H^2_+(p, r) give +1/r.
    """
    _, grad, *_ = kernels.graph_area_terms(g.xy, g.heights, g.triangles)
    m = vertex_masses(g)
    i = g.interior
    return grad[i] / (2.0 * m[i])


def area(g: SpacelikeGraph) -> float:
    A, _, _ = kernels.lorentz_area_grad(g.points, g.triangles)
    return float(np.sum(A))


def algebraic_volume(g: SpacelikeGraph) -> float:
    """Signed volume between the graph and {x3 = 0}, with vertex weights
    matching :func:`vertex_masses` (so d(volume)/du_i is the vertex mass)."""
    vol, _ = kernels.volume_grad(g.points, g.triangles)
    return float(vol) - center_mass_defect(g) * float(g.points[0, 2])


def lumped_lorentz_masses(g: SpacelikeGraph, N=None) -> np.ndarray:
    """Vertex share of the Lorentz area: planar mass times the local area factor."""
    N = future_normal(g) if N is None else N
    # -<N, a> = 1 / sqrt(1 - |grad u|^2)
    return vertex_masses(g) / (-minkowski_inner(N, A))


# -- boundary geometry ---------------------------------------------------------


def _periodic_diff(P):
    return 0.5 * (np.roll(P, -1, axis=0) - np.roll(P, 1, axis=0))


def boundary_tangents(g: SpacelikeGraph) -> np.ndarray:
    X = g.points[g.boundary]
    return normalize(_periodic_diff(X))


def boundary_normals(g: SpacelikeGraph) -> np.ndarray:
    """Future unit normals at outer boundary vertices.

    Polar meshes use second-order one-sided differences along the rays and
    centred differences along the boundary ring; other meshes fall back to
    the area-weighted vertex normal.
    """
    lay = g.layout
    if lay is None or lay.n_rings < 2:
        return future_normal(g)[g.boundary]
    K = lay.n_rings
    X0 = g.points[lay.ring(K)]
    X1 = g.points[lay.ring(K - 1)]
    X2 = g.points[lay.ring(K - 2)]  # the disc centre broadcasts when K == 2
    radial = 1.5 * X0 - 2.0 * X1 + 0.5 * X2
    along = _periodic_diff(X0)
    n = lorentz_cross(along, radial)
    n = normalize(n)
    flip = minkowski_inner(n, A) > 0
    n[flip] *= -1.0
    return n


@dataclass(frozen=True)
class BoundaryFrames:
    """Adapted frames at every outer boundary vertex, stored as (K, 3) arrays."""

    tau: np.ndarray
    nu: np.ndarray
    N: np.ndarray
    nu_sigma: np.ndarray
    N_sigma: np.ndarray
    epsilon: int
    ds: np.ndarray

    def __len__(self):
        return len(self.tau)

    def frame(self, k: int) -> BoundaryFrame:
        return BoundaryFrame(self.tau[k], self.nu[k], self.N[k], self.nu_sigma[k], self.N_sigma[k], self.epsilon)

    @property
    def contact(self) -> np.ndarray:
        return minkowski_inner(self.N, self.N_sigma)


def _orient_by_det(tau, v, n):
    det = np.einsum("ij,ij->i", tau, np.cross(v, n))
    return np.where(det[:, None] < 0, -v, v)


def boundary_frames(g: SpacelikeGraph, S, N=None) -> BoundaryFrames:
    """Frames {tau, nu, N} and {tau, nu_S, N_S} with det = +1 at each boundary vertex."""
    X = g.points[g.boundary]
    if not on_surface(S, X, TOL_SUPPORT):
        raise ValueError("boundary vertices are not on the support surface")
    d = _periodic_diff(X)
    if np.any(minkowski_inner(d, d) <= 0):
        raise ValueError("boundary tangent is not spacelike")
    tau = normalize(d)
    N = boundary_normals(g) if N is None else N
    N_s = S.normal(X)
    nu = normalize(lorentz_cross(N, tau))
    nu = _orient_by_det(tau, nu, N)
    nu_s = normalize(lorentz_cross(N_s, tau))
    nu_s = _orient_by_det(tau, nu_s, N_s)
    e = np.roll(X, -1, axis=0) - X
    edge = np.sqrt(np.maximum(minkowski_inner(e, e), 0.0))
    ds = 0.5 * (edge + np.roll(edge, 1))
    return BoundaryFrames(tau, nu, N, nu_s, N_s, S.epsilon, ds)


def _unwrapped_angles(xy, center):
    phi = np.arctan2(xy[:, 1] - center[1], xy[:, 0] - center[0])
    return np.unwrap(phi)


def wetted_area_terms(X, S, center=None):
    """Wetted area of the support region cut out by the closed boundary polygon X,
    and its gradient with respect to the boundary points.

    Pseudosphere: signed area between the curve and the waist, from the area
    element r^2 cosh(t) dt dphi of geodesic coordinates.  Hyperbolic plane: area
    enclosed around the apex.  Both use trapezoidal quadrature in the polar
    angle.  Plane: exact polygon area in the plane's own metric.
    """
    X = np.asarray(X, dtype=float)
    if S.kind == "plane":
        x, y = X[:, 0], X[:, 1]
        xn, yn = np.roll(x, -1), np.roll(y, -1)
        xp, yp = np.roll(x, 1), np.roll(y, 1)
        w = np.sqrt(1.0 - np.sum(S.height_gradient() ** 2))
        val = 0.5 * w * float(np.sum(x * yn - xn * y))
        grad = np.zeros_like(X)
        grad[:, 0] = 0.5 * w * (yn - yp)
        grad[:, 1] = 0.5 * w * (xp - xn)
        # the plane height is slaved to (x1, x2); keep the x3 slot zero
        return val, grad
    c = S.p[:2] if center is None else np.asarray(center, dtype=float)
    d = X[:, :2] - c
    rho2 = np.sum(d * d, axis=1)
    phi = _unwrapped_angles(X, c)
    dphi = np.diff(np.append(phi, phi[0] + 2 * np.pi))
    if S.kind == "pseudosphere":
        f = S.r**2 * (X[:, 2] - S.p[2]) / S.r  # r^2 sinh t with sinh t = (x3 - p3) / r
        df3 = np.full(len(X), S.r)
    else:
        f = S.r * S.branch * (X[:, 2] - S.p[2]) - S.r**2
        df3 = np.full(len(X), S.r * S.branch)
    fn = np.roll(f, -1)
    val = float(np.sum(0.5 * (f + fn) * dphi))
    grad = np.zeros_like(X)
    w_avg = 0.5 * (dphi + np.roll(dphi, 1))
    grad[:, 2] = df3 * w_avg
    # d phi_k / d(x, y)
    dphi_dx = -d[:, 1] / rho2
    dphi_dy = d[:, 0] / rho2
    coef = 0.5 * (np.roll(f, 1) + f) - 0.5 * (f + fn)
    grad[:, 0] = coef * dphi_dx
    grad[:, 1] = coef * dphi_dy
    return val, grad


def wetted_area(g: SpacelikeGraph, S) -> float:
    X = g.points[g.boundary]
    if not on_surface(S, X, TOL_SUPPORT):
        raise ValueError("boundary vertices are not on the support surface")
    if S.kind == "pseudosphere":
        _check_geodesic_graph(X, S)
    return wetted_area_terms(X, S)[0]


def _check_geodesic_graph(X, S):
    d = X[:, :2] - S.p[:2]
    phi = np.unwrap(np.arctan2(d[:, 1], d[:, 0]))
    steps = np.diff(np.append(phi, phi[0] + 2 * np.pi))
    if np.any(steps <= 0):
        raise ValueError("boundary is not a geodesic graph over the waist")


def _support_column(S, X, center):
    """Algebraic volume under S over the wetted wedge, per unit polar angle,
    measured from the chart origin (waist, apex or plane centre)."""
    from .umbilic import chart_coords

    a, _ = chart_coords(S, X, center)
    if S.kind == "pseudosphere":
        sh, ch = np.sinh(a), np.cosh(a)
        f = 0.5 * S.p[2] * S.r**2 * sh * sh + S.r**3 * sh**3 / 3.0
        df_da = S.r**2 * ch * sh * (S.p[2] + S.r * sh)
        da = np.column_stack([np.zeros(len(a)), np.zeros(len(a)), 1.0 / (S.r * ch)])
        return f, df_da[:, None] * da
    c = S.p[:2] if center is None else np.asarray(center, dtype=float)
    d = X[:, :2] - c
    rho = np.hypot(d[:, 0], d[:, 1])
    unit = d / rho[:, None]
    if S.kind == "hyperbolic":
        root = np.sqrt(S.r**2 + rho * rho)
        f = 0.5 * S.p[2] * rho**2 + S.branch * (root**3 - S.r**3) / 3.0
        df = S.p[2] * rho + S.branch * root * rho
        return f, np.column_stack([df[:, None] * unit, np.zeros(len(a))])
    s = S.height_gradient()
    h0 = float(S.height(c))
    slope = unit @ s
    f = 0.5 * h0 * rho**2 + slope * rho**3 / 3.0
    # grad of slope(rho-hat) . rho^3/3 in the plane
    perp = np.column_stack([-unit[:, 1], unit[:, 0]])
    dslope = (perp @ s)[:, None] * perp / rho[:, None]
    grad = (h0 * rho + slope * rho**2)[:, None] * unit + (rho**3 / 3.0)[:, None] * dslope
    return f, np.column_stack([grad, np.zeros(len(a))])


def support_volume_terms(X, S, center=None):
    """Algebraic volume under the support over the wetted region and its
    gradient with respect to the boundary points (trapezoid in the polar angle)."""
    X = np.asarray(X, dtype=float)
    c = S.p[:2] if center is None else np.asarray(center, dtype=float)
    f, df = _support_column(S, X, c)
    d = X[:, :2] - c
    rho2 = np.sum(d * d, axis=1)
    phi = _unwrapped_angles(X, c)
    dphi = np.diff(np.append(phi, phi[0] + 2 * np.pi))
    fn = np.roll(f, -1)
    val = float(np.sum(0.5 * (f + fn) * dphi))
    w_avg = 0.5 * (dphi + np.roll(dphi, 1))
    grad = df * w_avg[:, None]
    coef = 0.5 * (np.roll(f, 1) + f) - 0.5 * (f + fn)
    grad[:, 0] += coef * (-d[:, 1] / rho2)
    grad[:, 1] += coef * (d[:, 0] / rho2)
    return val, grad


def enclosed_volume(g: SpacelikeGraph, S) -> float:
    """Volume between the graph and the support: algebraic volume of the graph
    minus that of the wetted region.  Its first variation under any admissible
    motion is -int <N, xi> dA (no boundary term)."""
    return algebraic_volume(g) - support_volume_terms(g.points[g.boundary], S)[0]
