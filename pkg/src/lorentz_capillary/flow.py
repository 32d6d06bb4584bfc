"""Stationary capillary graphs: solver, generators and classification.

Stationary surfaces are saddle points of the energy.  The Lorentz area is
concave in the interior heights (spacelike surfaces maximise area), and the
reduced energy of the boundary is indefinite: wiggling the contact line along
a timelike support lowers it, while the radial mode raises it.  Descent on the
energy therefore walks away from stationary shapes, and the solver looks for
a root of the reduced gradient instead.  Two nested loops:

* inner: for fixed boundary, maximise ``A - 2 H V`` (or ``A`` at fixed volume)
  over interior heights by Newton's method with a spacelike line search;
* outer: damped Newton on ``dG/db = 0``, where ``G(b) = max_u F`` and ``b``
  are the boundary chart coordinates.  The gradient is exact by the envelope
  theorem.  The Hessian is the Schur complement of the full-space Hessian,
  whose boundary blocks come from finite differences of the (local) full
  gradient with one perturbation per colour of rays.  Steps are backtracked
  until the mean-square boundary force decreases, with the force weights
  (boundary arc length times chart speed) frozen at the current iterate;
  otherwise the rescaling of the weights can mask a good Newton step.

Interior vertices keep their polar rays; their planar radius follows the
boundary radius of their ray, except the centre fan, which is frozen.
"""
from __future__ import annotations

import io
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.integrate import quad
from scipy.interpolate import CubicHermiteSpline
from scipy.optimize import least_squares

from . import kernels, mesh
from .mesh import DegenerateMesh, SpacelikeGraph, SpacelikeViolation
from .umbilic import Pseudosphere, cap_boundary_height, chart_coords, chart_point
from .variational import StationarityReport, enclosed_volume_gradient, stationarity_report


class SolverError(RuntimeError):
    pass


class InadmissibleLambda(ValueError):
    pass


@dataclass(frozen=True)
class SolveOptions:
    lam: float = 0.0
    H_target: float | None = None
    volume_target: float | None = None
    max_iters: int = 50
    step0: float = 0.25  # largest boundary chart move per iteration
    residual_tol: float = 1e-6
    kkt_tol: float | None = None
    seed: int = 0
    inner_tol: float = 1e-12
    fd_step: float = 1e-6

    def __post_init__(self):
        if (self.H_target is None) == (self.volume_target is None):
            raise ValueError("give exactly one of H_target and volume_target")
        if self.residual_tol <= 0 or self.step0 <= 0:
            raise ValueError("residual_tol and step0 must be positive")
        if self.max_iters < 0:
            raise ValueError("max_iters must be non-negative")

    @property
    def kkt(self) -> float:
        return self.residual_tol if self.kkt_tol is None else self.kkt_tol


def check_lambda(S, lam: float) -> None:
    if S.kind != "pseudosphere" and lam > -1.0:
        raise InadmissibleLambda(
            f"inadmissible lambda for spacelike support: {lam} (need lambda <= -1, since <N, N_S> = -cosh(theta))"
        )


TRACE_COLUMNS = (
    "iter", "energy", "constrained", "area", "wetted", "volume", "volume_drift",
    "residual", "kkt", "merit", "merit_frozen", "step",
)


@dataclass
class Trace:
    rows: list = field(default_factory=list)

    def add(self, **kw):
        self.rows.append(tuple(kw[c] for c in TRACE_COLUMNS))

    def column(self, name: str) -> np.ndarray:
        i = TRACE_COLUMNS.index(name)
        return np.array([r[i] for r in self.rows], dtype=float)

    def to_csv(self) -> str:
        out = io.StringIO()
        out.write(",".join(TRACE_COLUMNS) + "\n")
        for r in self.rows:
            out.write(str(r[0]) + "," + ",".join(f"{v:.17g}" for v in r[1:]) + "\n")
        return out.getvalue()


@dataclass
class SolveResult:
    graph: SpacelikeGraph
    report: StationarityReport
    trace: Trace
    converged: bool
    iterations: int
    multiplier: float


# -- parametrisation -----------------------------------------------------------


class _Param:
    """Maps boundary chart coordinates b to vertex positions, heights separate."""

    def __init__(self, g: SpacelikeGraph, S):
        lay = g.layout
        if lay is None or lay.kind != "disc":
            raise ValueError("the solver needs a polar disc mesh")
        if S.kind != "plane" and np.linalg.norm(lay.center - S.p[:2]) > 1e-12:
            raise ValueError("mesh centre must sit above the support centre")
        self.g0, self.S, self.lay = g, S, lay
        self.c = lay.center
        K = lay.n_rings
        self.K = K
        self.bidx = lay.ring(K)
        self.phi = lay.angles.copy()
        self.dirs = np.stack([np.cos(self.phi), np.sin(self.phi)], axis=1)
        d = g.points[self.bidx, :2] - self.c
        if np.max(np.abs(np.arctan2(d[:, 1], d[:, 0]) - np.angle(np.exp(1j * self.phi)))) > 1e-9:
            raise ValueError("boundary vertices must lie on the layout rays")
        a, _ = chart_coords(S, g.points[self.bidx], self.c)
        self.b0 = a
        self.R0 = np.hypot(d[:, 0], d[:, 1])
        self.rho0 = {}
        fr = lay.fractions
        self.beta = np.zeros(K + 1)
        for j in range(2, K + 1):
            self.beta[j] = (fr[j] - fr[1]) / (fr[K] - fr[1])
        for j in range(1, K):
            dj = g.points[lay.ring(j), :2] - self.c
            self.rho0[j] = np.hypot(dj[:, 0], dj[:, 1])
        self.interior = g.interior
        self.ray = np.full(g.n_vertices, -1)
        for j in range(1, K + 1):
            self.ray[lay.ring(j)] = np.arange(lay.n_sectors)
        nb = lay.n_sectors
        # rays at cyclic distance <= 1 interact; colours need >= 3 residues
        self.n_colours = next((q for q in range(3, 8) if nb % q == 0), nb)

    def radius(self, b):
        X, dXa, _ = chart_point(self.S, b, self.phi, self.c)
        d = X[:, :2] - self.c
        R = np.hypot(d[:, 0], d[:, 1])
        dR = np.einsum("ij,ij->i", dXa[:, :2], self.dirs)
        return X, dXa, R, dR

    def points(self, b, u):
        """All vertex positions for boundary coordinates b and vertex heights u
        (boundary entries of u are ignored)."""
        X, _, R, _ = self.radius(b)
        P = np.empty_like(self.g0.points)
        P[:, 2] = u
        P[0, :2] = self.g0.points[0, :2]
        for j in range(1, self.K):
            rho = self.rho0[j] + self.beta[j] * (R - self.R0)
            P[self.lay.ring(j), :2] = self.c + rho[:, None] * self.dirs
        P[self.bidx] = X
        return P

    def chain(self, gradL, b):
        """dG/db from the full coordinate gradient of the Lagrangian."""
        _, dXa, _, dR = self.radius(b)
        out = np.einsum("ij,ij->i", gradL[self.bidx], dXa)
        for j in range(2, self.K):
            gr = np.einsum("ij,ij->i", gradL[self.lay.ring(j), :2], self.dirs)
            out += self.beta[j] * gr * dR
        return out


# -- inner solve ---------------------------------------------------------------


def _max_spacelike_step(xy, u, d, tri, bound2):
    """Largest s in (0, 1] with |grad(u + s d)|^2 <= bound2 on every triangle."""
    p0, p1, p2 = xy[tri[:, 0]], xy[tri[:, 1]], xy[tri[:, 2]]
    e1, e2 = p1 - p0, p2 - p0
    twice = e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0]

    def grad(v):
        v1, v2 = v[tri[:, 1]] - v[tri[:, 0]], v[tri[:, 2]] - v[tri[:, 0]]
        return np.stack([(v1 * e2[:, 1] - v2 * e1[:, 1]) / twice, (v2 * e1[:, 0] - v1 * e2[:, 0]) / twice], 1)

    g0, gd = grad(u), grad(d)
    # |g0 + s gd|^2 = bound2 -> a s^2 + 2 b s + c = 0
    a = np.sum(gd * gd, 1)
    bq = np.sum(g0 * gd, 1)
    c = np.sum(g0 * g0, 1) - bound2
    disc = np.maximum(bq * bq - a * c, 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        s = np.where(a > 0, (-bq + np.sqrt(disc)) / a, np.inf)
    return float(min(1.0, np.min(s)))


# squared Newton decrement below which the inner objective is flat to rounding
DECREMENT_TOL = 1e-24


class _Inner:
    def __init__(self, g: SpacelikeGraph, mode_H: float | None, delta_space: float, tol: float):
        self.tri = g.triangles
        self.I = g.interior
        self.n = g.n_vertices
        self.H = mode_H
        self.bound2 = (1.0 - delta_space) ** 2
        self.tol = tol
        self.defect = 0.0

    def masses(self, P):
        m = mesh.barycentric_masses(P, self.tri)
        m[0] -= self.defect
        return m

    def objective(self, xy, u, m):
        A, gA, *_ = kernels.graph_area_terms(xy, u, self.tri)
        if self.H is None:
            return A, gA
        return A - 2.0 * self.H * float(m @ u), gA - 2.0 * self.H * m

    def solve(self, xy, u, m, vol_rhs=None, max_newton=200):
        """Maximise over interior heights.  Returns (u, mu, iterations)."""
        I = self.I
        u = u.copy()
        mI = m[I]
        mu = 0.0 if self.H is None else -2.0 * self.H
        for it in range(max_newton):
            _, gA, rows, cols, vals, _ = kernels.graph_area_terms(xy, u, self.tri, True)
            Hs = sp.csc_matrix((vals, (rows, cols)), shape=(self.n, self.n))[I][:, I]
            if self.H is not None:
                gI = gA[I] - 2.0 * self.H * mI
                res = np.max(np.abs(gI / mI))
                if res < self.tol:
                    return u, mu, it
                d = spla.spsolve(Hs.tocsc(), -gI)
                if abs(float(gI @ d)) < DECREMENT_TOL:
                    return u, mu, it
            else:
                r = vol_rhs - float(m @ u)
                K = sp.bmat([[Hs, sp.csc_matrix(mI[:, None])], [sp.csr_matrix(mI[None, :]), None]], format="csc")
                sol = spla.spsolve(K, np.concatenate([-gA[I], [r]]))
                d, mu_new = sol[:-1], sol[-1]
                gI = gA[I] + mu_new * mI
                res = max(np.max(np.abs(gI / mI)), abs(r) / max(1.0, abs(vol_rhs)))
                mu = mu_new
                if res < self.tol or (abs(r) <= 1e-13 * max(1.0, abs(vol_rhs)) and abs(float(gI @ d)) < DECREMENT_TOL):
                    return u, mu, it
            full = np.zeros(self.n)
            full[I] = d
            s = _max_spacelike_step(xy, u, full, self.tri, self.bound2)
            s = min(1.0, 0.95 * s) if s < 1.0 else 1.0
            if self.H is None and abs(r) > 1e-13 * max(1.0, abs(vol_rhs)):
                # restore the (linear) volume constraint first
                u = u + s * full
                continue
            F0, _ = self.objective(xy, u, m)
            slope = float(gI @ d) if self.H is not None else float(gA[I] @ d)
            if abs(slope) < 1e-14 * len(self.tri) * max(1.0, abs(F0)):
                # gain below the rounding noise of the area sum: plain Newton
                u = u + s * full
                continue
            for _ in range(60):
                trial = u + s * full
                F1, _ = self.objective(xy, trial, m)
                if F1 >= F0 + 1e-4 * s * slope - 1e-15 * abs(F0):
                    break
                s *= 0.5
            else:
                if res < 1e3 * self.tol:
                    return u, mu, it  # merit stalled at rounding level
                raise SolverError("inner Newton line search failed")
            u = trial
        raise SolverError("inner Newton did not converge")


# -- outer solve ---------------------------------------------------------------


def solve_stationary(S, opts: SolveOptions, init: SpacelikeGraph) -> SolveResult:
    """Drive ``init`` to a stationary graph with boundary on S.

    Converged means: H and contact-angle spreads below ``residual_tol`` and the
    boundary force density below ``opts.kkt``.
    """
    check_lambda(S, opts.lam)
    par = _Param(init, S)
    inner = _Inner(init, opts.H_target, init.delta_space, opts.inner_tol)
    inner.defect = mesh.center_mass_defect(init)
    tri = init.triangles
    I = init.interior
    lam = float(opts.lam)
    vol_mode = opts.volume_target is not None

    def evaluate(b, u_start):
        P = par.points(b, u_start)
        xy = P[:, :2]
        areas = mesh.planar_areas(P, tri)
        if np.any(areas <= 0):
            raise SpacelikeViolation(int(np.argmin(areas)), np.nan, 1.0 - init.delta_space)
        # boundary heights come from the chart; keep the interior start spacelike
        u = P[:, 2]
        if np.max(mesh.gradient_norm2(P, tri)) > inner.bound2:
            u = _spacelike_start(P, tri, init, inner.bound2)
        m = inner.masses(P)
        Xb = P[par.bidx]
        Vs, _ = mesh.support_volume_terms(Xb, S, par.c)
        rhs = opts.volume_target + Vs if vol_mode else None
        u, mu, _ = inner.solve(xy, u, m, rhs)
        P[:, 2] = u
        g = init.with_points(P)
        A = mesh.area(g)
        W, _ = mesh.wetted_area_terms(Xb, S, par.c)
        V = mesh.algebraic_volume(g) - Vs
        E = A + lam * W
        G = E if vol_mode else E + mu * V
        gradL = _lagrangian_gradient(g, S, lam, mu, par.c)
        dG = par.chain(gradL, b)
        return dict(g=g, u=u, m=m, E=E, G=G, A=A, W=W, V=V, mu=mu, dG=dG, b=b)

    def gradients(b, u, mu):
        g = init.with_points(par.points(b, u))
        gl = _lagrangian_gradient(g, S, lam, mu, par.c)
        return gl[I, 2], par.chain(gl, b)

    def weights(st):
        _, dXa, _, _ = par.radius(st["b"])
        return _boundary_ds(st["g"]) * np.linalg.norm(dXa, axis=1)

    def forces(st):
        return st["dG"] / weights(st)

    def newton_step(st):
        """Full-space Newton direction (du, db) at an inner optimum."""
        b, u, mu = st["b"], st["u"], st["mu"]
        nb, nI, n = len(b), len(I), init.n_vertices
        pos = np.full(n, -1)
        pos[I] = np.arange(nI)
        rayI = par.ray[I]
        eps = opts.fd_step
        ru, cu, vu, rb, cb, vb = [], [], [], [], [], []
        q = par.n_colours
        for c in range(q):
            e = np.zeros(nb)
            e[c::q] = eps
            gu_p, gb_p = gradients(b + e, u, mu)
            gu_m, gb_m = gradients(b - e, u, mu)
            du = (gu_p - gu_m) / (2 * eps)
            db = (gb_p - gb_m) / (2 * eps)
            for off in (-1, 0, 1):
                k = (rayI + off) % nb
                sel = (rayI >= 0) & (k % q == c)
                ru.append(np.flatnonzero(sel)), cu.append(k[sel]), vu.append(du[sel])
                kb = (np.arange(nb) + off) % nb
                selb = kb % q == c
                rb.append(np.flatnonzero(selb)), cb.append(kb[selb]), vb.append(db[selb])
        Hub = sp.csr_matrix((np.concatenate(vu), (np.concatenate(ru), np.concatenate(cu))), shape=(nI, nb))
        Hbb = sp.csr_matrix((np.concatenate(vb), (np.concatenate(rb), np.concatenate(cb))), shape=(nb, nb))
        Hbb = 0.5 * (Hbb + Hbb.T)
        _, gA, rows, cols, vals, _ = kernels.graph_area_terms(st["g"].points[:, :2], u, tri, True)
        Huu = sp.csr_matrix((vals, (rows, cols)), shape=(n, n))[I][:, I]
        gu, gb = gradients(b, u, mu)
        blocks = [[Huu, Hub], [Hub.T, Hbb]]
        rhs = [-gu, -gb]
        if vol_mode:
            gvol = enclosed_volume_gradient(st["g"], S, par.c)
            Ju = sp.csr_matrix(gvol[I, 2][None, :])
            Jb = sp.csr_matrix(par.chain(gvol, b)[None, :])
            blocks = [[Huu, Hub, Ju.T], [Hub.T, Hbb, Jb.T], [Ju, Jb, None]]
            rhs.append([opts.volume_target - st["V"]])
        K = sp.bmat(blocks, format="csc")
        sol = spla.spsolve(K, np.concatenate([np.ravel(r) for r in rhs]))
        if not np.all(np.isfinite(sol)):
            raise SolverError("singular Newton system")
        du = np.zeros(n)
        du[I] = sol[:nI]
        return du, sol[nI:nI + nb]

    b = par.b0.copy()
    state = evaluate(b, init.points[:, 2])
    V0 = state["V"] if not vol_mode else opts.volume_target
    trace = Trace()

    def record(it, st, step, frozen):
        rep = stationarity_report(st["g"], S)
        f = forces(st)
        k = float(np.max(np.abs(f)))
        trace.add(
            iter=it, energy=st["E"], constrained=st["G"], area=st["A"], wetted=st["W"], volume=st["V"],
            volume_drift=st["V"] - V0, residual=rep.residual, kkt=k, merit=float(np.mean(f * f)),
            merit_frozen=frozen, step=step,
        )
        return rep, k

    rep, k = record(0, state, 0.0, float(np.mean(forces(state) ** 2)))
    it = 0
    converged = rep.residual < opts.residual_tol and k < opts.kkt
    while not converged and it < opts.max_iters:
        it += 1
        try:
            du, db = newton_step(state)
        except DegenerateMesh as exc:
            raise SolverError(f"boundary collapsed onto the frozen centre ({exc})") from exc
        big = np.max(np.abs(db))
        scale = min(1.0, opts.step0 / big) if big > 0 else 1.0
        # weights frozen at the current iterate: then db is a descent direction
        w0 = weights(state)
        merit0 = float(np.mean(forces(state) ** 2))
        s = scale
        new = None
        for _ in range(40):
            try:
                trial = evaluate(state["b"] + s * db, state["u"] + s * du)
            except (SpacelikeViolation, SolverError, ValueError):
                s *= 0.5
                continue
            frozen = float(np.mean((trial["dG"] / w0) ** 2))
            if frozen <= (1.0 - 1e-4 * s) * merit0:
                new = trial
                break
            s *= 0.5
        if new is None:
            if k < 1e3 * opts.kkt and rep.residual < opts.residual_tol:
                break  # stalled at rounding level
            raise SolverError("spacelike barrier hit with step underflow (line search failed)")
        state = new
        rep, k = record(it, state, s, frozen)
        converged = rep.residual < opts.residual_tol and k < opts.kkt
    drift = abs(state["V"] - V0)
    if vol_mode and drift > 1e-8 * abs(V0) + 1e-12:
        raise SolverError(f"volume drift {drift:.3e} exceeds tolerance")
    return SolveResult(state["g"], rep, trace, bool(converged), it, float(state["mu"]))


def _boundary_ds(g):
    X = g.points[g.boundary]
    e = np.roll(X, -1, axis=0) - X
    edge = np.sqrt(np.maximum(np.sum(e[:, :2] ** 2, 1) - e[:, 2] ** 2, 0.0))
    return 0.5 * (edge + np.roll(edge, 1))


def _lagrangian_gradient(g, S, lam, mu, center):
    _, grad, _ = kernels.lorentz_area_grad(g.points, g.triangles)
    grad = grad.copy()
    Xb = g.points[g.boundary]
    if lam != 0.0:
        _, wg = mesh.wetted_area_terms(Xb, S, center)
        grad[g.boundary] += lam * wg
    if mu != 0.0:
        grad += mu * enclosed_volume_gradient(g, S, center)
    return grad


def _spacelike_start(P, tri, g, bound2):
    """Interior heights pulled toward the boundary mean until spacelike."""
    u = P[:, 2].copy()
    I = g.interior
    target = np.mean(P[g.boundary, 2])
    for _ in range(60):
        if np.max(mesh.gradient_norm2(np.column_stack([P[:, :2], u]), tri)) <= bound2:
            return u
        u[I] = 0.5 * (u[I] + target)
    raise SpacelikeViolation(-1, np.nan, np.sqrt(bound2))


# -- generators ------------------------------------------------------------------


def analytic_cap(c: float, r: float, n_rings: int = 32, n_sectors: int | None = None, S=None) -> SpacelikeGraph:
    """Cap of the hyperbolic plane centred at (0, 0, c) (unit frame of S) with
    radius r, cut off by the pseudosphere S, as a polar graph."""
    S = S if S is not None else Pseudosphere()
    z = cap_boundary_height(c, r)
    branch = 1 if z >= c else -1
    Rb = np.sqrt(1.0 + z * z)

    def u(x, y):
        return c + branch * np.sqrt(r * r + x * x + y * y)

    dom = mesh.polar_disc(Rb, n_rings, n_sectors)
    g = mesh.build_graph(dom, u)
    P = S.from_unit(g.points)
    _snap_boundary(P, g, S)
    lay = g.layout
    lay = mesh.PolarLayout("disc", lay.n_rings, lay.n_sectors, S.p[:2].copy(), lay.angles, lay.fractions)
    return mesh.SpacelikeGraph(P, g.triangles, g.boundary, None, S, lay)


def analytic_disc(h: float = 0.0, n_rings: int = 32, n_sectors: int | None = None, S=None) -> SpacelikeGraph:
    """Horizontal disc x3 = h (unit frame of S) bounded by the pseudosphere."""
    S = S if S is not None else Pseudosphere()
    Rb = np.sqrt(1.0 + h * h)
    g = mesh.build_graph(mesh.polar_disc(Rb, n_rings, n_sectors), lambda x, y: np.full_like(x, h))
    P = S.from_unit(g.points)
    _snap_boundary(P, g, S)
    lay = g.layout
    lay = mesh.PolarLayout("disc", lay.n_rings, lay.n_sectors, S.p[:2].copy(), lay.angles, lay.fractions)
    return mesh.SpacelikeGraph(P, g.triangles, g.boundary, None, S, lay)


def support_piece(S, a0: float, n_rings: int = 32, n_sectors: int | None = None, center=None) -> SpacelikeGraph:
    """The part of a spacelike support over its chart disc {a <= a0}: a graph whose
    boundary lies on S (useful as an initial guess)."""
    if S.kind == "pseudosphere":
        raise ValueError("the pseudosphere is timelike; use analytic_cap or analytic_disc")
    c = S.p[:2] if center is None else np.asarray(center, dtype=float)
    dom = mesh.polar_disc(a0, n_rings, n_sectors, c)
    return mesh.build_graph(dom, lambda x, y: S.height(np.stack([x, y], -1)), S)


def initial_guess(S, lam: float, H: float | None, n_rings: int = 32, a0: float | None = None) -> SpacelikeGraph:
    """Default starting graph for a capillary solve.

    Pseudosphere: the cap H^2((0,0,-sqrt(2 lam)), 1) when lam > 0, otherwise the
    disc at height -lam.  Planes: the support piece out to the boundary radius
    of the rotational cap sqrt(lam^2 - 1) / |H| (radius 1 when H = 0).  Newton
    only converges from nearby, and a far start can collapse the boundary.
    """
    if S.kind == "pseudosphere":
        if lam > 0:
            return analytic_cap(-np.sqrt(2.0 * lam), 1.0, n_rings, S=S)
        return analytic_disc(-lam, n_rings, S=S)
    if a0 is None:
        a0 = 1.0
        if S.kind == "plane" and H:
            a0 = float(np.clip(np.sqrt(max(lam * lam - 1.0, 0.0)) / abs(H), 0.25, 10.0))
        elif S.kind == "hyperbolic":
            a0 = 0.6 * S.r
    return support_piece(S, a0, n_rings)


def _snap_boundary(P, g, S):
    # recompute boundary points through the chart so they sit on S to rounding
    a, phi = chart_coords(S, P[g.boundary])
    P[g.boundary] = chart_point(S, a, phi)[0]


def perturb(g: SpacelikeGraph, amplitude: float, seed: int, modes: int = 3) -> SpacelikeGraph:
    """Seeded smooth interior bump: low polynomial modes times (1 - f^2), f the
    relative ray position, so the boundary is untouched."""
    if amplitude == 0:
        return g
    lay = g.layout
    if lay is None:
        raise ValueError("perturb needs a polar layout")
    rng = np.random.default_rng(seed)
    f = np.zeros(g.n_vertices)
    ang = np.zeros(g.n_vertices)
    j0 = 1 if lay.kind == "disc" else 0
    for j in range(j0, lay.n_rings + 1):
        f[lay.ring(j)] = lay.fractions[j]
        ang[lay.ring(j)] = lay.angles
    z = f * np.exp(1j * ang)
    coef = rng.normal(size=(modes + 1, 2))
    bump = np.zeros(g.n_vertices)
    for m in range(modes + 1):
        bump += (coef[m, 0] * (z**m).real + coef[m, 1] * (z**m).imag) / (1 + m)
    bump *= 1.0 - f * f
    if lay.kind == "annulus":
        bump *= f
    bump *= amplitude / np.max(np.abs(bump))
    u = g.heights + bump
    u[g.boundary] = g.heights[g.boundary]
    if g.inner_boundary is not None:
        u[g.inner_boundary] = g.heights[g.inner_boundary]
    return g.with_heights(u)


# -- rotational CMC profiles ---------------------------------------------------------


@dataclass(frozen=True)
class Profile:
    """Samples (rho, u) of a rotational graph.  CMC profiles carry their first
    integral (H, c) and the dimension of the revolved hypersurface; other
    profiles pass the slope function ``du``."""

    rho: np.ndarray
    u: np.ndarray
    H: float = np.nan
    c: float = np.nan
    du: Callable[[np.ndarray], np.ndarray] | None = None
    dim: int = 2

    def slope(self, rho=None):
        rho = self.rho if rho is None else np.asarray(rho, dtype=float)
        if self.du is not None:
            return self.du(rho)
        return _cmc_slope(rho, self.H, self.c, self.dim)

    def height(self, rho):
        """Height at arbitrary radii by cubic Hermite interpolation of the samples."""
        return CubicHermiteSpline(self.rho, self.u, self.slope())(rho)


def cap_profile(c: float, r: float, rho_max: float | None = None, n_samples: int = 257) -> Profile:
    """Upper sheet u = c + sqrt(r^2 + rho^2) of H^2((0,0,c), r); by default cut
    where it meets the unit pseudosphere."""
    if rho_max is None:
        h = cap_boundary_height(c, r)
        rho_max = float(np.sqrt(1.0 + h * h))
    rho = np.linspace(0.0, rho_max, n_samples)
    return Profile(rho, c + np.sqrt(r * r + rho * rho), 1.0 / r, 0.0)


def disc_profile(h: float = 0.0, rho_max: float = 1.0, n_samples: int = 257) -> Profile:
    rho = np.linspace(0.0, rho_max, n_samples)
    return Profile(rho, np.full(n_samples, float(h)), 0.0, 0.0)


def _cmc_slope(rho, H, c, dim):
    # rho^(n-1) u' / sqrt(1 - u'^2) = H rho^n + c
    f = H * rho**dim + c
    w = rho ** (dim - 1)
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(f == 0, 0.0, f / np.sqrt(w * w + f * f))


def rotational_cmc_profile(H: float, c: float, rho_range, n_samples: int, tol: float = 1e-12, dim: int = 2) -> Profile:
    """Samples of the rotational spacelike CMC profile with first integral
    rho^(n-1) u' / sqrt(1 - u'^2) = H rho^n + c (n = ``dim``), normalised to
    u = 0 at the first radius."""
    r0, r1 = map(float, rho_range)
    if not 0 <= r0 < r1:
        raise ValueError("need 0 <= rho_min < rho_max")
    if r0 == 0 and c != 0:
        raise ValueError("profile with c != 0 reaches rho = 0: conical (lightlike) point")
    if n_samples < 2:
        raise ValueError("need at least two samples")
    if dim < 1:
        raise ValueError("dim must be positive")
    rho = np.linspace(r0, r1, n_samples)

    def du(x):
        return float(_cmc_slope(np.array(x), H, c, dim))

    u = np.zeros(n_samples)
    for i in range(1, n_samples):
        val, _ = quad(du, rho[i - 1], rho[i], epsabs=tol, epsrel=tol, limit=200)
        u[i] = u[i - 1] + val
    return Profile(rho, u, float(H), float(c), dim=int(dim))


def revolve_profile(profile: Profile, n_sectors: int | None = None) -> SpacelikeGraph:
    """Annulus (or disc when the profile starts at 0) whose rings are the profile samples."""
    rho = profile.rho
    n = len(rho) - 1
    if rho[0] == 0:
        xy, tri, lay = mesh.polar_disc(rho[-1], n, n_sectors)
        if not np.allclose(lay.fractions * rho[-1], rho):
            raise ValueError("disc profiles need equally spaced samples")
        u = np.empty(len(xy))
        u[0] = profile.u[0]
        for j in range(1, n + 1):
            u[lay.ring(j)] = profile.u[j]
    else:
        xy, tri, lay = mesh.polar_annulus(rho[0], rho[-1], n, n_sectors)
        u = np.empty(len(xy))
        for j in range(n + 1):
            u[lay.ring(j)] = profile.u[j]
    return mesh.build_graph((xy, tri, lay), u)


# -- classification --------------------------------------------------------------------


PLANAR_DISC = "PlanarDisc"
HYPERBOLIC_CAP = "HyperbolicCap"
OTHER = "Other"
FIT_TOL = 1e-5


@dataclass(frozen=True)
class Classification:
    kind: str
    params: dict
    rms_fit: float
    plane_rms: float
    quadric_rms: float


def fit_plane(X):
    """Least-squares affine height x3 = h + s . (x1, x2); returns (h, s, rms)."""
    M = np.column_stack([np.ones(len(X)), X[:, 0], X[:, 1]])
    coef, *_ = np.linalg.lstsq(M, X[:, 2], rcond=None)
    rms = float(np.sqrt(np.mean((M @ coef - X[:, 2]) ** 2)))
    return float(coef[0]), coef[1:].copy(), rms


def fit_hyperbolic(X):
    """Fit <x - p, x - p> = -r^2 (one branch).  Algebraic start, then height
    residuals refined by least squares.  Returns (p, r, branch, rms) or None."""
    q = X[:, 0] ** 2 + X[:, 1] ** 2 - X[:, 2] ** 2
    M = np.column_stack([2 * X[:, 0], 2 * X[:, 1], -2 * X[:, 2], np.ones(len(X))])
    coef, *_ = np.linalg.lstsq(M, q, rcond=None)
    p = coef[:3]
    pp = p[0] ** 2 + p[1] ** 2 - p[2] ** 2
    r2 = -coef[3] - pp
    if not np.isfinite(r2) or r2 <= 0:
        return None
    branch = 1 if np.mean(X[:, 2]) >= p[2] else -1

    def resid(v):
        pv, lr = v[:3], v[3]
        rho2 = (X[:, 0] - pv[0]) ** 2 + (X[:, 1] - pv[1]) ** 2
        return pv[2] + branch * np.sqrt(np.exp(2 * lr) + rho2) - X[:, 2]

    sol = least_squares(resid, np.concatenate([p, [0.5 * np.log(r2)]]), xtol=1e-15, ftol=1e-15, gtol=1e-15)
    res = resid(sol.x)
    return sol.x[:3].copy(), float(np.exp(sol.x[3])), branch, float(np.sqrt(np.mean(res**2)))


def classify(g: SpacelikeGraph, fit_tol: float = FIT_TOL) -> Classification:
    """Plane or hyperbolic-plane fit of all vertices; ``Other`` when neither
    rms is below fit_tol times the diameter."""
    X = g.points
    tol = fit_tol * g.diameter()
    h, s, prms = fit_plane(X)
    hyp = fit_hyperbolic(X)
    qrms = np.inf if hyp is None else hyp[3]
    if prms <= tol and prms <= qrms:
        return Classification(PLANAR_DISC, {"height": h, "slope": s.tolist()}, prms, prms, qrms)
    if qrms <= tol:
        p, r, br, _ = hyp
        return Classification(HYPERBOLIC_CAP, {"center": p.tolist(), "radius": r, "branch": br}, qrms, prms, qrms)
    return Classification(OTHER, {}, float(min(prms, qrms)), prms, qrms)
