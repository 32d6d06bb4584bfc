"""Capillary energy, volume and their first variations on spacelike graphs."""
from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

from . import kernels, mesh
from .lorentz_core import minkowski_inner
from .mesh import SpacelikeGraph
from .umbilic import chart_coords, chart_point

TOL_TANGENT = 1e-8


class NotAdmissible(ValueError):
    """Variation field leaves the support surface at a boundary vertex."""


class NotStationary(ValueError):
    pass


@dataclass(frozen=True)
class EnergyBreakdown:
    surface_area: float
    wetted_area: float
    lam: float
    energy: float
    volume: float

    @classmethod
    def build(cls, surface_area, wetted_area, lam, volume):
        return cls(surface_area, wetted_area, lam, surface_area + lam * wetted_area, volume)


def energy(g: SpacelikeGraph, S, lam: float) -> EnergyBreakdown:
    return EnergyBreakdown.build(mesh.area(g), mesh.wetted_area(g, S), float(lam), mesh.algebraic_volume(g))


@dataclass(frozen=True)
class VariationField:
    """A vector per vertex.  ``check`` enforces tangency to the support on the boundary."""

    xi: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "xi", np.asarray(self.xi, dtype=float))

    def check(self, g: SpacelikeGraph, S, tol: float = TOL_TANGENT) -> None:
        if self.xi.shape != g.points.shape:
            raise ValueError(f"field has shape {self.xi.shape}, mesh has {g.points.shape}")
        b = g.boundary
        Ns = S.normal(g.points[b])
        off = np.abs(minkowski_inner(Ns, self.xi[b]))
        scale = np.maximum(np.linalg.norm(self.xi[b], axis=1), 1.0)
        bad = np.flatnonzero(off > tol * scale)
        if bad.size:
            k = int(bad[np.argmax(off[bad])])
            raise NotAdmissible(
                f"<N_S, xi> = {off[k]:.3e} at boundary vertex {int(b[k])}; xi must be tangent to the support"
            )

    def norm(self, g: SpacelikeGraph) -> float:
        """Mass-weighted Euclidean L2 norm."""
        m = mesh.vertex_masses(g)
        return float(np.sqrt(np.sum(m * np.sum(self.xi**2, axis=1))))


def _as_field(xi) -> VariationField:
    return xi if isinstance(xi, VariationField) else VariationField(xi)


def first_variation_volume(g: SpacelikeGraph, xi) -> float:
    """-sum_i <N_i, xi_i> dA_i with lumped Lorentz vertex areas."""
    xi = _as_field(xi).xi
    if xi.shape != g.points.shape:
        raise ValueError(f"field has shape {xi.shape}, mesh has {g.points.shape}")
    N = mesh.future_normal(g)
    dA = mesh.lumped_lorentz_masses(g, N)
    return float(-np.sum(minkowski_inner(N, xi) * dA))


def vertex_mean_curvature(g: SpacelikeGraph) -> np.ndarray:
    """H at every vertex; boundary values extrapolated along the polar rays."""
    H = np.zeros(g.n_vertices)
    H[g.interior] = mesh.mean_curvature(g)
    lay = g.layout
    loops = [g.boundary] if g.inner_boundary is None else [g.boundary, g.inner_boundary]
    if lay is not None and lay.n_rings >= 3:
        K = lay.n_rings
        H[lay.ring(K)] = 2 * H[lay.ring(K - 1)] - H[lay.ring(K - 2)]
        if lay.kind == "annulus":
            H[lay.ring(0)] = 2 * H[lay.ring(1)] - H[lay.ring(2)]
        return H
    # unstructured fallback: mean of interior neighbours
    tri = g.triangles
    interior = np.zeros(g.n_vertices, dtype=bool)
    interior[g.interior] = True
    for loop in loops:
        for v in loop:
            nb = np.unique(tri[np.any(tri == v, axis=1)])
            nb = nb[interior[nb]]
            H[v] = H[nb].mean() if nb.size else 0.0
    return H


@dataclass(frozen=True)
class FirstVariation:
    """Terms of the first variation of the energy (discrete formula)."""

    interior: float
    boundary: float
    dropped: float

    @property
    def total(self) -> float:
        return self.interior + self.boundary


def first_variation_terms(g: SpacelikeGraph, S, lam: float, xi, tol: float = TOL_TANGENT) -> FirstVariation:
    """-2 int H <N, xi> dA  and  -oint (lam - <N, N_S>) <nu_S, xi> ds, plus the
    term -oint <N, nu_S><N_S, xi> ds that admissible fields make vanish."""
    field = _as_field(xi)
    field.check(g, S, tol)
    xi = field.xi
    N = mesh.future_normal(g)
    dA = mesh.lumped_lorentz_masses(g, N)
    H = vertex_mean_curvature(g)
    inner = float(-2.0 * np.sum(H * minkowski_inner(N, xi) * dA))
    fr = mesh.boundary_frames(g, S)
    xb = xi[g.boundary]
    bdry = float(-np.sum((lam - fr.contact) * minkowski_inner(fr.nu_sigma, xb) * fr.ds))
    dropped = float(-np.sum(minkowski_inner(fr.N, fr.nu_sigma) * minkowski_inner(fr.N_sigma, xb) * fr.ds))
    return FirstVariation(inner, bdry, dropped)


def first_variation_energy(g: SpacelikeGraph, S, lam: float, xi, tol: float = TOL_TANGENT) -> float:
    fv = first_variation_terms(g, S, lam, xi, tol)
    scale = max(1.0, _as_field(xi).norm(g))
    if abs(fv.dropped) > tol * scale:
        raise NotAdmissible(f"tangency term {fv.dropped:.3e} exceeds tolerance")
    return fv.total


def energy_gradient(g: SpacelikeGraph, S, lam: float) -> np.ndarray:
    """Exact derivative of the discrete energy with respect to every vertex coordinate."""
    _, grad, _ = kernels.lorentz_area_grad(g.points, g.triangles)
    if lam != 0.0:
        _, wg = mesh.wetted_area_terms(g.points[g.boundary], S)
        grad = grad.copy()
        grad[g.boundary] += lam * wg
    return grad


def volume_gradient(g: SpacelikeGraph) -> np.ndarray:
    """Exact derivative of :func:`mesh.algebraic_volume` for fixed planar positions
    of the polar centre fan (vertical part exact everywhere)."""
    _, grad = kernels.volume_grad(g.points, g.triangles)
    grad = grad.copy()
    grad[0, 2] -= mesh.center_mass_defect(g)
    return grad


def enclosed_volume_gradient(g: SpacelikeGraph, S, center=None) -> np.ndarray:
    grad = volume_gradient(g)
    _, sg = mesh.support_volume_terms(g.points[g.boundary], S, center)
    grad[g.boundary] -= sg
    return grad


def discrete_first_variation(g: SpacelikeGraph, S, lam: float, xi, mu: float = 0.0) -> float:
    """d/dt [E + mu V] along xi from the exact discrete gradients (V the enclosed volume)."""
    field = _as_field(xi)
    field.check(g, S)
    grad = energy_gradient(g, S, lam)
    if mu != 0.0:
        grad = grad + mu * enclosed_volume_gradient(g, S)
    return float(np.sum(grad * field.xi))


# -- stationarity -------------------------------------------------------------


@dataclass(frozen=True)
class StationarityReport:
    H_values: np.ndarray
    angle_values: np.ndarray
    interior_ids: np.ndarray
    boundary_ids: np.ndarray

    @property
    def H_mean(self) -> float:
        return float(np.mean(self.H_values)) if self.H_values.size else 0.0

    @property
    def H_std(self) -> float:
        return float(np.std(self.H_values)) if self.H_values.size else 0.0

    @property
    def angle_mean(self) -> float:
        return float(np.mean(self.angle_values))

    @property
    def angle_std(self) -> float:
        return float(np.std(self.angle_values))

    @property
    def residual(self) -> float:
        return max(self.H_std, self.angle_std)

    def summary(self) -> str:
        return (
            f"H_mean={self.H_mean:.12g} H_std={self.H_std:.6e} "
            f"angle_mean={self.angle_mean:.12g} angle_std={self.angle_std:.6e} "
            f"residual={self.residual:.6e}"
        )

    def to_csv(self) -> str:
        out = io.StringIO()
        out.write("vertex_id,quantity,value\n")
        for i, h in zip(self.interior_ids, self.H_values):
            out.write(f"{int(i)},H,{h:.17g}\n")
        for i, c in zip(self.boundary_ids, self.angle_values):
            out.write(f"{int(i)},contact,{c:.17g}\n")
        return out.getvalue()


def stationarity_report(g: SpacelikeGraph, S) -> StationarityReport:
    H = mesh.mean_curvature(g)
    fr = mesh.boundary_frames(g, S)
    return StationarityReport(H, fr.contact, g.interior.copy(), g.boundary.copy())


def lagrange_multiplier(g: SpacelikeGraph, threshold: float = 1e-3) -> float:
    """mu = -2 H for an (approximately) constant-H graph."""
    H = mesh.mean_curvature(g)
    std = float(np.std(H))
    if std > threshold:
        raise NotStationary(f"H is not constant (std {std:.3e} > {threshold:.1e}); multiplier undefined")
    return -2.0 * float(np.mean(H))


# -- admissible test variations ------------------------------------------------


@dataclass(frozen=True)
class AdmissibleVariation:
    """Interior velocity ``xi`` plus boundary motion in the support chart.

    Boundary vertex k follows ``chart_point(S, a_k + s alpha_k, phi_k + s beta_k)``
    so every member of the family keeps its boundary on S, and ``xi`` at the
    boundary is the chart velocity (tangent to S by construction).
    """

    field: VariationField
    alpha: np.ndarray
    beta: np.ndarray

    def apply(self, g: SpacelikeGraph, S, s: float) -> SpacelikeGraph:
        c = g.layout.center if g.layout is not None else None
        a, phi = chart_coords(S, g.points[g.boundary], c)
        P = g.points + s * self.field.xi
        P[g.boundary] = chart_point(S, a + s * self.alpha, phi + s * self.beta, c)[0]
        return g.with_points(P)


def random_admissible_variation(g: SpacelikeGraph, S, rng, amplitude: float = 1.0, modes: int = 3) -> AdmissibleVariation:
    """Smooth random admissible field: low trigonometric modes in the plane,
    blended near the boundary into low Fourier modes of the chart velocities."""
    lay = g.layout
    if lay is None:
        raise ValueError("random admissible variations need a polar layout")
    c = lay.center
    X = g.points
    d = X[:, :2] - c
    R = np.max(np.hypot(d[:, 0], d[:, 1]))
    x, y = d[:, 0] / R, d[:, 1] / R
    xi = np.zeros_like(X)
    for comp in range(3):
        coef = rng.normal(size=(modes, modes, 2)) / (1.0 + np.add.outer(np.arange(modes), np.arange(modes)))[..., None]
        for i in range(modes):
            for j in range(modes):
                arg = 0.5 * np.pi * (i * x + j * y)
                xi[:, comp] += coef[i, j, 0] * np.cos(arg) + coef[i, j, 1] * np.sin(arg)
    a, phi = chart_coords(S, X[g.boundary], c)
    ka = rng.normal(size=(modes, 2))
    kb = rng.normal(size=(modes, 2)) * 0.1
    m = np.arange(modes)[:, None]
    alpha = (ka[:, :1] * np.cos(m * phi) + ka[:, 1:] * np.sin(m * phi)).sum(0)
    beta = (kb[:, :1] * np.cos(m * phi) + kb[:, 1:] * np.sin(m * phi)).sum(0)
    _, dXa, dXp = chart_point(S, a, phi, c)
    xb = alpha[:, None] * dXa + beta[:, None] * dXp
    # blend: vertex on ray k at fraction f gets (1 - f^2) interior + f^2 boundary
    if lay.kind == "disc":
        f = np.zeros(g.n_vertices)
        for j in range(1, lay.n_rings + 1):
            f[lay.ring(j)] = lay.fractions[j]
            xi[lay.ring(j)] = (1 - f[lay.ring(j)][:, None] ** 2) * xi[lay.ring(j)] + (
                f[lay.ring(j)][:, None] ** 2
            ) * xb
    else:
        raise ValueError("random admissible variations are built for discs")
    xi[g.boundary] = xb
    scale = amplitude / max(np.max(np.abs(xi)), 1e-300)
    return AdmissibleVariation(VariationField(xi * scale), alpha * scale, beta * scale)
