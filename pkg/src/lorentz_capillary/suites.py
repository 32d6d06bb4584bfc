"""Named verification suites behind ``lorentz-capillary verify``.

Each suite returns a :class:`~lorentz_capillary.theorems.SuiteResult` whose
lines are structured verdicts.  Negative controls pass when the bad input is
rejected.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import flow, hopf, mesh, theorems, variational
from .theorems import SuiteResult, _verdict
from .umbilic import HyperbolicPlane, Pseudosphere, chart_point, plane_through

SUITES = ("covering", "one-side", "hopf", "gradients")


# -- gradients ------------------------------------------------------------------


def wavy_graph(n_rings: int, S=None) -> mesh.SpacelikeGraph:
    """A non-stationary disc graph with boundary t = 0.2 + 0.05 cos 2phi + 0.03 sin 3phi
    on the unit pseudosphere and a bumpy interior."""
    S = Pseudosphere() if S is None else S
    xy, tri, lay = mesh.polar_disc(1.0, n_rings)
    phi = lay.angles
    t = 0.2 + 0.05 * np.cos(2 * phi) + 0.03 * np.sin(3 * phi)
    Xb, _, _ = chart_point(S, t, phi)
    R = np.hypot(Xb[:, 0], Xb[:, 1])
    P = np.zeros((lay.n_vertices, 3))
    for j in range(1, lay.n_rings + 1):
        f = lay.fractions[j]
        ring = lay.ring(j)
        P[ring, :2] = (f * R)[:, None] * np.stack([np.cos(phi), np.sin(phi)], 1)
        P[ring, 2] = f**2 * Xb[:, 2] + (1 - f**2) * 0.1 * np.sin(np.pi * f) * np.cos(phi)
    return mesh.SpacelikeGraph(P, tri, lay.ring(lay.n_rings), None, S, lay)


@dataclass
class GradientCheck:
    energy_errors: np.ndarray
    volume_errors: np.ndarray

    @property
    def worst(self) -> float:
        return float(max(self.energy_errors.max(), self.volume_errors.max()))


def gradient_check(n_rings: int = 96, n_fields: int = 50, lam: float = 0.4, seed: int = 0,
                   step: float = 1e-5, amplitude: float = 0.3) -> GradientCheck:
    """First-variation formulas against centred differences along random
    admissible families.  Errors are relative to sum_i |grad_i . xi_i|, the
    size of the variation before cancellation."""
    S = Pseudosphere()
    g = wavy_graph(n_rings, S)
    rng = np.random.default_rng(seed)
    gE = variational.energy_gradient(g, S, lam)
    gV = variational.enclosed_volume_gradient(g, S)
    eE, eV = [], []
    for _ in range(n_fields):
        av = variational.random_admissible_variation(g, S, rng, amplitude)
        xi = av.field.xi
        gp, gm = av.apply(g, S, step), av.apply(g, S, -step)
        dE = (variational.energy(gp, S, lam).energy - variational.energy(gm, S, lam).energy) / (2 * step)
        dV = (mesh.enclosed_volume(gp, S) - mesh.enclosed_volume(gm, S)) / (2 * step)
        fE = variational.first_variation_energy(g, S, lam, xi)
        fV = variational.first_variation_volume(g, xi)
        eE.append(abs(fE - dE) / np.sum(np.abs(gE * xi)))
        eV.append(abs(fV - dV) / np.sum(np.abs(gV * xi)))
    return GradientCheck(np.array(eE), np.array(eV))


def gradients_suite(n_rings: int = 96, n_fields: int = 50, tol: float = 1e-3) -> SuiteResult:
    res = SuiteResult("gradients")
    gc = gradient_check(n_rings, n_fields)
    for name, e in (("energy", gc.energy_errors), ("volume", gc.volume_errors)):
        ok = bool(e.max() < tol)
        res.add(_verdict(f"first-variation-{name}", ok, None if ok else int(np.argmax(e)), "", tol=tol,
                         fields=len(e), max_rel_error=float(e.max()), mean_rel_error=float(e.mean())), ok)
    return res


# -- covering ---------------------------------------------------------------------


def covering_suite(n_samples: int = 2048, n_random: int = 100, seed: int = 0) -> SuiteResult:
    res = SuiteResult("covering")
    waist = theorems.waist_curve(n_samples)
    tilted = theorems.SampledCurve.plane_section(0.4, 0.0, 0.2, n_samples)
    for name, c in (("waist", waist), ("tilted-section", tilted)):
        r = theorems.check_covering(c)
        ok = r.ok and r.winding == 1 and r.geodesic_graph
        res.add(f"{r.verdict()} curve={name}", ok)
        p = theorems.check_graph_on_plane(c)
        res.add(f"{p.verdict()} curve={name}", p.ok)
    rng = np.random.default_rng(seed)
    worst, bad = 0.0, []
    for i in range(n_random):
        r = theorems.check_covering(theorems.random_spacelike_curve(rng, n_samples))
        worst = max(worst, r.identity_error)
        if not (r.ok and abs(r.winding) == 1 and r.geodesic_graph):
            bad.append(i)
    ok = not bad
    res.add(_verdict("covering-family", ok, bad[0] if bad else None, "", curves=n_random,
                     max_identity_error=worst), ok)
    null = theorems.SampledCurve.geodesic_graph(np.sin, n_samples)
    r = theorems.check_covering(null)
    ok = (not r.ok) and r.witness == 0
    res.add(f"{r.verdict()} curve=null-tangent expect=reject", ok)
    double = theorems.SampledCurve.geodesic_graph(lambda p: 0.3 * np.sin(p / 2), n_samples, turns=2)
    r = theorems.check_covering(double)
    ok = r.ok and r.winding == 2 and not r.embedded
    res.add(f"{r.verdict()} curve=double-cover", ok)
    p = theorems.check_graph_on_plane(theorems.with_mirror_sample(tilted, n_samples // 3))
    ok = (not p.ok) and p.witness == (n_samples // 3, n_samples // 3 + 1)
    res.add(f"{p.verdict()} curve=mirror-pair expect=reject", ok)
    return res


# -- one side ---------------------------------------------------------------------


def _solve(S, lam, H, init, max_iters=50):
    r = flow.solve_stationary(S, flow.SolveOptions(lam=lam, H_target=H, max_iters=max_iters), init)
    return r


def one_side_suite(n_rings: int = 24) -> SuiteResult:
    res = SuiteResult("one-side")
    # analytic cap lifted so its boundary circle sits in {x3 = 0}
    cap = flow.analytic_cap(-np.sqrt(2), 1.0, n_rings)
    r = theorems.check_one_side_plane(cap)
    res.add(f"{r.verdict()} surface=cap", r.verdict_kind == theorems.BELOW)
    r = theorems.check_one_side_plane(flow.analytic_disc(0.0, n_rings))
    res.add(f"{r.verdict()} surface=flat-disc", r.verdict_kind == theorems.CONTAINED)
    P = plane_through(0.0)
    for lam, H in ((-1.2, 1.0), (-1.5, -0.5)):
        sol = _solve(P, lam, H, flow.initial_guess(P, lam, H, n_rings))
        r = theorems.check_one_side_plane(sol.graph)
        ok = sol.converged and r.ok and r.verdict_kind != theorems.CONTAINED
        res.add(f"{r.verdict()} surface=plane-solve lambda={lam} H={H} converged={str(sol.converged).lower()}", ok)
    sol = _solve(P, -1.0, 0.0, flow.perturb(flow.support_piece(P, 1.0, n_rings), 0.05, 5))
    r = theorems.check_one_side_plane(sol.graph)
    ok = sol.converged and r.verdict_kind == theorems.CONTAINED
    res.add(f"{r.verdict()} surface=plane-solve lambda=-1 H=0 converged={str(sol.converged).lower()}", ok)
    Hn = HyperbolicPlane([0.0, 0.0, 0.0], 1.0, 1)
    sol = _solve(Hn, -1.2, 2.0, flow.support_piece(Hn, 0.6, n_rings))
    r = theorems.check_one_side_hyperbolic(sol.graph, Hn)
    ok = sol.converged and r.ok and r.verdict_kind != theorems.CONTAINED
    res.add(f"{r.verdict()} surface=hyperbolic-solve lambda=-1.2 H=2 converged={str(sol.converged).lower()}", ok)
    own = flow.support_piece(Hn, 0.6, n_rings)
    r = theorems.check_one_side_hyperbolic(own, Hn)
    ok = r.verdict_kind == theorems.CONTAINED and max(abs(r.value_min), abs(r.value_max)) < 1e-10
    res.add(f"{r.verdict()} surface=hyperbolic-plane-piece", ok)
    # higher dimension along profiles: hyperbolic 3-space pieces and CMC profiles
    for dim in (2, 3):
        prof = flow.rotational_cmc_profile(2.0, 0.0, [0.0, 1.0], 129, dim=dim)
        r = theorems.check_one_side_profile(prof)
        res.add(f"{r.verdict()} profile=H2-dim{dim}", r.ok and r.verdict_kind != theorems.CONTAINED)
        r = theorems.check_one_side_profile(prof, HyperbolicPlane([0.0, 0.0, -1.0], 1.0))
        res.add(f"{r.verdict()} profile=H2-dim{dim} reference=hyperbolic", r.ok and r.verdict_kind != theorems.CONTAINED)
        prof = flow.rotational_cmc_profile(1.0, 0.0, [0.0, 1.0], 129, dim=dim)
        r = theorems.check_one_side_profile(prof, HyperbolicPlane([0.0, 0.0, -1.0], 1.0))
        res.add(f"{r.verdict()} profile=H1-dim{dim} reference=hyperbolic", r.verdict_kind == theorems.CONTAINED)
    return res


# -- hopf ---------------------------------------------------------------------------


def hopf_suite(n_r: int = 128, n_theta: int = 256) -> SuiteResult:
    res = SuiteResult("hopf")
    for name, prof in (("cap-c-sqrt2", flow.cap_profile(-np.sqrt(2), 1.0)),
                       ("cap-c-1.2", flow.cap_profile(-1.2, 1.0)),
                       ("disc", flow.disc_profile(0.0))):
        P = hopf.conformal_parametrize_rotational(prof, n_r, n_theta)
        F = hopf.hopf_differential(P)
        conf = P.conformality_residual()
        m = F.max_abs()
        b = float(np.max(np.abs(hopf.boundary_imz2phi(F))))
        ext = hopf.harmonic_extension(hopf.boundary_imz2phi(F), P.r[P.rings])
        interior = float(np.max(np.abs(hopf.imz2phi(F)[P.rings])))
        ok = conf < hopf.TOL_CONF and m < 1e-6 and b < 1e-6 and interior < 1e-5 and np.max(np.abs(ext)) < 1e-5
        res.add(_verdict("umbilical-patch", ok, None, "", surface=name, conformality=conf, max_phi=m,
                         max_boundary_imz2phi=b, max_interior_imz2phi=interior), ok)
    prof = flow.cap_profile(-np.sqrt(2), 1.0)
    P = hopf.conformal_parametrize_rotational(prof, n_r, n_theta)
    exact = 2 * np.pi * (np.sqrt(2) - 1)
    err = abs(P.area() - exact)
    res.add(_verdict("patch-area", err < 1e-6, None, "", area=P.area(), closed_form=exact, error=err), err < 1e-6)
    annulus = flow.rotational_cmc_profile(1.0, 0.5, [0.3, 1.2], 256)
    coarse = hopf.hopf_differential(hopf.conformal_parametrize_rotational(annulus, n_r // 2, n_theta // 2))
    fine = hopf.hopf_differential(hopf.conformal_parametrize_rotational(annulus, n_r, n_theta))
    rc, rf = hopf.holomorphicity_residual(coarse), hopf.holomorphicity_residual(fine)
    ok = rc / rf >= 3.4
    res.add(_verdict("holomorphic-cmc", ok, None, "", coarse=rc, fine=rf, ratio=rc / rf, order=np.log2(rc / rf)), ok)
    lo = float(np.min(np.abs(fine.phi[fine.patch.rings])))
    res.add(_verdict("non-umbilical-annulus", lo > 1e-2, None, "", min_phi=lo), lo > 1e-2)
    b = float(np.max(np.abs(hopf.boundary_imz2phi(fine))))
    res.add(_verdict("annulus-boundary-imz2phi", b < 1e-6, None, "rotational symmetry forces zero", value=b), b < 1e-6)
    bumpy = non_cmc_profile()
    nc = [hopf.holomorphicity_residual(hopf.hopf_differential(hopf.conformal_parametrize_rotational(bumpy, n, 2 * n)))
          for n in (n_r // 2, n_r)]
    ok = nc[1] > 0.5 * nc[0]
    res.add(_verdict("non-cmc-control", ok, None, "", coarse=nc[0], fine=nc[1]), ok)
    return res


def non_cmc_profile():
    """u = sqrt(1 + rho^2) - 1 + 0.1 rho^4 on [0, 0.8]: spacelike, H not constant."""
    rho = np.linspace(0.0, 0.8, 101)
    return flow.Profile(rho, np.sqrt(1 + rho**2) - 1 + 0.1 * rho**4,
                        du=lambda r: r / np.sqrt(1 + r * r) + 0.4 * r**3)


def run_suite(name: str) -> SuiteResult:
    table = {"covering": covering_suite, "one-side": one_side_suite, "hopf": hopf_suite, "gradients": gradients_suite}
    if name == "all":
        out = SuiteResult("all")
        for s in SUITES:
            r = table[s]()
            out.lines.extend(r.lines)
            out.passed.extend(r.passed)
        return out
    if name not in table:
        raise KeyError(name)
    return table[name]()
