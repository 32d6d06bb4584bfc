"""Hopf differential of rotational spacelike surfaces in conformal coordinates.

A rotational graph x = (rho cos t, rho sin t, u(rho)) has first fundamental
form (1 - u'^2) drho^2 + rho^2 dt^2.  Setting d(log r) = sqrt(1 - u'^2) drho / rho
turns it into E^2 (dr^2 + r^2 dt^2) with E = rho / r, so z = r e^{it} is a
conformal coordinate on the unit disc (or an annulus r_in <= |z| <= 1).

Everything downstream of the patch works on samples only: derivatives of the
immersion come from finite differences, the normal from their Lorentz cross
product.  In polar coordinates the Hopf differential is

    phi = h11 - h22 - 2i h12 = e^{-2it} (s_rr - (2i/r) s_rt - s_tt / r^2),

with s the second fundamental form in (r, t).
"""
from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson, solve_ivp

from .lorentz_core import lorentz_cross, minkowski_inner

STENCIL = 7  # radial finite-difference width
ODE_TOL = 1e-13
TOL_CONF = 1e-8


@dataclass(frozen=True, eq=False)
class ConformalPatch:
    """Polar grid (r_j, theta_k) with immersion samples and second fundamental
    form.  ``r[0] == 0`` marks a disc; that node is the centre and only feeds
    radial stencils."""

    r: np.ndarray
    theta: np.ndarray
    rho: np.ndarray
    E: np.ndarray
    X: np.ndarray  # (n_r, n_theta, 3)
    s_rr: np.ndarray
    s_rt: np.ndarray
    s_tt: np.ndarray
    Xr: np.ndarray
    Xt: np.ndarray

    @property
    def is_disc(self) -> bool:
        return self.r[0] == 0.0

    @property
    def rings(self) -> np.ndarray:
        """Ring indices away from the polar singularity."""
        return np.arange(1 if self.is_disc else 0, len(self.r))

    def conformality_residual(self) -> float:
        """max of |<x_r,x_r> - <x_t,x_t>/r^2| and |<x_r,x_t>|/r, relative to E^2."""
        j = self.rings
        r = self.r[j, None]
        Xr, Xt = self.Xr[j], self.Xt[j]
        g11 = minkowski_inner(Xr, Xr)
        g22 = minkowski_inner(Xt, Xt) / r**2
        g12 = minkowski_inner(Xr, Xt) / r
        E2 = self.E[j, None] ** 2
        return float(max(np.max(np.abs(g11 - g22) / E2), np.max(np.abs(g12) / E2)))

    def area(self) -> float:
        """Area as the integral of E^2 r dr dtheta."""
        f = self.E**2 * self.r
        return float(2 * np.pi * simpson(f, x=self.r))

    def mean_curvature(self) -> np.ndarray:
        """H = -(s_rr + s_tt / r^2) / (2 E^2) on ``rings``; the sign (from
        <N, N> = -1) makes upper hyperbolic caps positive, as on meshes."""
        j = self.rings
        r = self.r[j, None]
        return -(self.s_rr[j] + self.s_tt[j] / r**2) / (2 * self.E[j, None] ** 2)


@dataclass(frozen=True, eq=False)
class HopfField:
    patch: ConformalPatch
    phi: np.ndarray  # complex, (n_r, n_theta); NaN at the disc centre

    def z(self) -> np.ndarray:
        return self.patch.r[:, None] * np.exp(1j * self.patch.theta)[None, :]

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.phi[self.patch.rings])))

    def to_csv(self) -> str:
        P = self.patch
        w = imz2phi(self)
        out = io.StringIO()
        out.write("r,theta,re_phi,im_phi,im_z2phi\n")
        for j in P.rings:
            for k, t in enumerate(P.theta):
                v = self.phi[j, k]
                out.write(f"{P.r[j]:.17g},{t:.17g},{v.real:.17g},{v.imag:.17g},{w[j, k]:.17g}\n")
        return out.getvalue()


# -- finite differences ------------------------------------------------------------


def fd_weights(x0: float, nodes, order: int) -> np.ndarray:
    """Weights w with sum w_i f(nodes_i) ~ f^(order)(x0) (exact for polynomials
    of degree < len(nodes))."""
    d = np.asarray(nodes, dtype=float) - x0
    n = len(d)
    V = np.vander(d, n, increasing=True).T
    rhs = np.zeros(n)
    rhs[order] = float(np.prod(np.arange(1, order + 1)))
    return np.linalg.solve(V, rhs)


def _radial_derivatives(F, r, disc: bool, width: int = STENCIL):
    """First and second radial derivatives of F (n_r, n_theta, ...) on every
    ring.  Disc stencils cross the centre through F(-r, t) = F(r, t + pi)."""
    n_r, n_t = F.shape[:2]
    if disc and n_t % 2:
        raise ValueError("disc patches need an even number of angles")
    half = width // 2
    d1 = np.zeros_like(F)
    d2 = np.zeros_like(F)
    flip = np.roll(np.arange(n_t), -n_t // 2)
    for j in range(n_r):
        if disc:
            lo = max(j - half, -(n_r - 1))
            idx = np.arange(lo, lo + width)
            idx = idx[idx <= n_r - 1]
            if len(idx) < width:
                idx = np.arange(n_r - width, n_r)
        else:
            lo = min(max(j - half, 0), n_r - width)
            idx = np.arange(lo, lo + width)
        x = np.where(idx < 0, -r[np.abs(idx)], r[np.abs(idx)])
        w1, w2 = fd_weights(r[j], x, 1), fd_weights(r[j], x, 2)
        for w_1, w_2, i in zip(w1, w2, idx):
            v = F[-i][flip] if i < 0 else F[i]
            d1[j] += w_1 * v
            d2[j] += w_2 * v
    return d1, d2


def _angular_derivative(F, order: int = 1):
    """Spectral derivative along the periodic second axis."""
    n_t = F.shape[1]
    k = np.fft.fftfreq(n_t, 1.0 / n_t)
    mult = (1j * k) ** order
    if order % 2 and n_t % 2 == 0:
        mult[n_t // 2] = 0.0
    shape = (1, n_t) + (1,) * (F.ndim - 2)
    return np.real(np.fft.ifft(np.fft.fft(F, axis=1) * mult.reshape(shape), axis=1))


# -- conformal parametrisation -----------------------------------------------------


def _conformal_radius(profile, ode_tol: float):
    """Dense solution of (rho, u) against s = log r, with s = 0 at the outer radius.
    Returns (solution, s_inner)."""
    rho1 = float(profile.rho[-1])
    rho0 = float(profile.rho[0])

    def rhs(s, y):
        p = float(profile.slope(np.array([y[0]]))[0])
        q = 1.0 - p * p
        if q <= 0:
            raise ValueError("profile is not spacelike")
        dr = y[0] / np.sqrt(q)
        return [dr, p * dr]

    if rho0 > 0:
        hit = lambda s, y: y[0] - rho0  # noqa: E731
        hit.terminal = True
        sol = solve_ivp(rhs, (0.0, -50.0), [rho1, profile.u[-1]], method="DOP853",
                        rtol=ode_tol, atol=ode_tol * 1e-3, dense_output=True, events=hit)
        if not sol.t_events[0].size:
            raise ValueError("conformal radius did not reach the inner circle")
        return sol, float(sol.t_events[0][0])
    sol = solve_ivp(rhs, (0.0, np.log(1e-9)), [rho1, profile.u[-1]], method="DOP853",
                    rtol=ode_tol, atol=ode_tol * 1e-3, dense_output=True)
    return sol, -np.inf


def conformal_parametrize_rotational(profile, n_r: int = 128, n_theta: int = 256,
                                     ode_tol: float = ODE_TOL) -> ConformalPatch:
    """Conformal polar patch of the surface of revolution of ``profile``.

    ``profile`` needs ``rho``, ``u`` arrays (only the end samples are used) and
    a ``slope(rho)`` method.  A disc profile (``rho[0] == 0``) must be smooth at
    the axis.
    """
    if n_r < STENCIL or n_theta < 4:
        raise ValueError("grid too small")
    disc = profile.rho[0] == 0
    if disc and abs(float(profile.slope(np.array([1e-9]))[0])) > 1e-6:
        raise ValueError("profile reaches rho = 0 with a cone point")
    sol, s_in = _conformal_radius(profile, ode_tol)
    if disc:
        r = np.linspace(0.0, 1.0, n_r + 1)
    else:
        r = np.linspace(np.exp(s_in), 1.0, n_r + 1)
        r[0] = np.exp(s_in)
    rho = np.empty_like(r)
    u = np.empty_like(r)
    s_grid = np.log(np.where(r > 0, r, 1e-9))
    y = sol.sol(s_grid)
    rho[:], u[:] = y[0], y[1]
    if disc:
        rho[0] = 0.0
        E0 = y[0][0] / 1e-9
    E = np.empty_like(r)
    E[r > 0] = rho[r > 0] / r[r > 0]
    if disc:
        E[0] = E0
    theta = 2 * np.pi * np.arange(n_theta) / n_theta
    c, s = np.cos(theta), np.sin(theta)
    X = np.stack([rho[:, None] * c[None, :], rho[:, None] * s[None, :], np.repeat(u[:, None], n_theta, 1)], axis=-1)
    return _patch_from_samples(r, theta, rho, E, X, disc)


def _patch_from_samples(r, theta, rho, E, X, disc):
    Xr, Xrr = _radial_derivatives(X, r, disc)
    Xt = _angular_derivative(X, 1)
    Xtt = _angular_derivative(X, 2)
    Xrt = _angular_derivative(Xr, 1)
    n = lorentz_cross(Xr, Xt)
    q = -minkowski_inner(n, n)
    N = np.full_like(n, np.nan)
    ok = q > 0
    N[ok] = n[ok] / np.sqrt(q[ok])[:, None]
    N[ok] *= np.sign(N[ok][:, 2])[:, None]  # future: <N, a> < 0
    s_rr = minkowski_inner(Xrr, N)
    s_rt = minkowski_inner(Xrt, N)
    s_tt = minkowski_inner(Xtt, N)
    return ConformalPatch(r, theta, rho, E, X, s_rr, s_rt, s_tt, Xr, Xt)


# -- Hopf differential -------------------------------------------------------------


def hopf_differential(patch: ConformalPatch) -> HopfField:
    r = patch.r[:, None]
    e = np.exp(-2j * patch.theta)[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        phi = e * (patch.s_rr - 2j * patch.s_rt / r - patch.s_tt / r**2)
    if patch.is_disc:
        phi[0] = np.nan
    return HopfField(patch, phi)


def holomorphicity_residual(field: HopfField) -> float:
    """max |d phi / d zbar| over interior nodes, by centred differences:
    d/dzbar = e^{it} (d/dr + (i/r) d/dt) / 2."""
    P = field.patch
    phi = field.phi
    n_r, n_t = phi.shape
    j = np.arange(2 if P.is_disc else 1, n_r - 1)
    if j.size == 0:
        return 0.0
    if np.all(phi[P.rings] == 0):
        return 0.0
    dr = (phi[j + 1] - phi[j - 1]) / (P.r[j + 1] - P.r[j - 1])[:, None]
    h = 2 * np.pi / n_t
    dt = (np.roll(phi[j], -1, axis=1) - np.roll(phi[j], 1, axis=1)) / (2 * h)
    dzbar = 0.5 * np.exp(1j * P.theta)[None, :] * (dr + 1j * dt / P.r[j, None])
    return float(np.max(np.abs(dzbar)))


def imz2phi(field: HopfField) -> np.ndarray:
    """Im(z^2 phi) on the grid; equals -2 r s_rt."""
    with np.errstate(invalid="ignore"):
        return np.imag(field.z() ** 2 * field.phi)


def boundary_imz2phi(field: HopfField) -> np.ndarray:
    return imz2phi(field)[-1]


def harmonic_extension(boundary_values, r) -> np.ndarray:
    """Harmonic function on the unit disc with the given values on |z| = 1,
    evaluated on radii ``r`` (Fourier series b_m r^|m| e^{imt})."""
    b = np.fft.fft(np.asarray(boundary_values, dtype=float))
    m = np.abs(np.fft.fftfreq(len(b), 1.0 / len(b)))
    r = np.asarray(r, dtype=float)
    return np.real(np.fft.ifft(b[None, :] * r[:, None] ** m[None, :], axis=1))


def umbilicity_terms(field: HopfField) -> dict:
    """Both sides of the umbilicity relation on the rings away from the axis:
    |phi|^2, H, the Gauss curvature K = -Lap(log E) / E^2 of the conformal metric,
    and E.  Conformal geometry gives |phi|^2 = 4 E^4 (H^2 + K)."""
    P = field.patch
    logE = np.log(P.E)
    d1, d2 = _radial_derivatives(np.repeat(logE[:, None], 2, axis=1), P.r, P.is_disc)
    j = P.rings
    lap = d2[j, 0] + d1[j, 0] / P.r[j]
    K = -lap / P.E[j] ** 2
    H = P.mean_curvature().mean(axis=1)
    phi2 = np.mean(np.abs(field.phi[j]) ** 2, axis=1)
    return {"r": P.r[j], "phi2": phi2, "H": H, "K": K, "E": P.E[j]}


def umbilicity_report(field: HopfField) -> str:
    """Logged comparison of |phi|^2 with E^4 (H^2 + K) and with (H^2 + K) / (4 E^2).
    The fitted ratio is reported, nothing is asserted."""
    t = umbilicity_terms(field)
    s = t["H"] ** 2 + t["K"]
    lines = ["r,phi2,H2_plus_K,4E4_H2_plus_K,H2_plus_K_over_4E2"]
    for r, p, v, e in zip(t["r"], t["phi2"], s, t["E"]):
        lines.append(f"{r:.10g},{p:.10g},{v:.10g},{4 * e**4 * v:.10g},{v / (4 * e * e):.10g}")
    big = np.abs(s) > 1e-6
    if np.any(big):
        ratio = t["phi2"][big] / (s[big] * t["E"][big] ** 4)
        lines.append(f"# phi2 / (E^4 (H^2 + K)): mean {ratio.mean():.6g}, spread {ratio.std():.3g}")
    else:
        lines.append(f"# H^2 + K vanishes to {np.max(np.abs(s)):.3g}; max phi2 {np.max(t['phi2']):.3g}")
    return "\n".join(lines)
