"""Lorentzian linear algebra in L^{n+1} with signature (+, ..., +, -).

Vectors are plain numpy arrays whose last coordinate is the timelike one.
Every function accepts stacked input (shape ``(..., n+1)``) where that makes
sense, so mesh code can call them on whole vertex arrays.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

TAU_NULL = 1e-10
TAU_ORTH = 1e-8

SPACELIKE = "spacelike"
LIGHTLIKE = "lightlike"
TIMELIKE = "timelike"


def time_axis(dim: int = 3) -> np.ndarray:
    """The unit timelike vector a = (0, ..., 0, 1)."""
    a = np.zeros(dim)
    a[-1] = 1.0
    return a


def minkowski_inner(u, v):
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape[-1] != v.shape[-1]:
        raise ValueError(f"dimension mismatch: {u.shape[-1]} vs {v.shape[-1]}")
    return np.sum(u[..., :-1] * v[..., :-1], axis=-1) - u[..., -1] * v[..., -1]


def lorentz_norm2(v):
    return minkowski_inner(v, v)


def metric_flip(v):
    """Apply diag(1, ..., 1, -1); turns a Euclidean gradient into a Lorentz one."""
    w = np.array(v, dtype=float, copy=True)
    w[..., -1] *= -1.0
    return w


def causal_character(v, tol: float = TAU_NULL) -> str:
    v = np.asarray(v, dtype=float)
    e2 = float(np.dot(v, v))
    if e2 == 0.0:
        raise ValueError("causal character of the zero vector is undefined")
    q = float(minkowski_inner(v, v))
    if abs(q) <= tol * e2:
        return LIGHTLIKE
    return SPACELIKE if q > 0 else TIMELIKE


def is_future_directed(v, tol: float = TAU_NULL) -> bool:
    if causal_character(v, tol) != TIMELIKE:
        raise ValueError("future direction is only defined for timelike vectors")
    v = np.asarray(v, dtype=float)
    return bool(minkowski_inner(v, time_axis(v.shape[-1])) < 0)


def normalize(v):
    """Scale v (or each row) to |<v,v>| = 1.  Null vectors raise."""
    v = np.asarray(v, dtype=float)
    q = np.abs(minkowski_inner(v, v))
    if np.any(q == 0):
        raise ValueError("cannot normalise a null vector")
    return v / np.sqrt(q)[..., None]


def lorentz_cross(u, v):
    """Vector Lorentz-orthogonal to both u and v in L^3."""
    return metric_flip(np.cross(u, v))


def hyperbolic_angle(N, N_sigma, eps: int) -> float:
    """Contact angle theta between a spacelike surface and a support surface.

    ``eps = +1`` (timelike support): sinh(theta) = <N, N_sigma>.
    ``eps = -1`` (spacelike support): -cosh(theta) = <N, N_sigma>, theta >= 0.
    """
    m = float(minkowski_inner(N, N_sigma))
    if eps == 1:
        return float(np.arcsinh(m))
    if eps == -1:
        if m > -1.0 + 1e-12:
            if m > -1.0 + 1e-9:
                raise ValueError(
                    f"<N, N_sigma> = {m} > -1 is impossible for two future unit timelike vectors"
                )
            return 0.0
        return float(np.arccosh(-m))
    raise ValueError("eps must be +1 or -1")


def frame_from_projections(s: float, m: float, nu_sigma, N_sigma, eps: int, tol: float = 1e-9):
    """Rebuild (N, nu) from s = <N, nu_sigma> and m = <N, N_sigma>."""
    if eps not in (1, -1):
        raise ValueError("eps must be +1 or -1")
    if abs(eps * (m * m - s * s) + 1.0) > tol * max(1.0, m * m + s * s):
        raise ValueError(f"inconsistent projections: eps*(m^2 - s^2) = {eps * (m * m - s * s)}")
    nu_sigma = np.asarray(nu_sigma, dtype=float)
    N_sigma = np.asarray(N_sigma, dtype=float)
    N = -eps * s * nu_sigma + eps * m * N_sigma
    nu = -m * nu_sigma + s * N_sigma
    return N, nu


@dataclass(frozen=True)
class BoundaryFrame:
    """Two adapted frames {tau, nu, N} and {tau, nu_sigma, N_sigma} at a boundary point."""

    tau: np.ndarray
    nu: np.ndarray
    N: np.ndarray
    nu_sigma: np.ndarray
    N_sigma: np.ndarray
    epsilon: int

    @property
    def contact(self) -> float:
        return float(minkowski_inner(self.N, self.N_sigma))

    def invariant_errors(self) -> dict:
        ip = minkowski_inner
        e = self.epsilon
        errs = {
            "tau": abs(ip(self.tau, self.tau) - 1),
            "N": abs(ip(self.N, self.N) + 1),
            "nu": abs(ip(self.nu, self.nu) - 1),
            "N_sigma": abs(ip(self.N_sigma, self.N_sigma) - e),
            "nu_sigma": abs(ip(self.nu_sigma, self.nu_sigma) + e),
            "orth": max(
                abs(ip(self.tau, self.nu)),
                abs(ip(self.tau, self.N)),
                abs(ip(self.nu, self.N)),
                abs(ip(self.tau, self.nu_sigma)),
                abs(ip(self.tau, self.N_sigma)),
                abs(ip(self.nu_sigma, self.N_sigma)),
            ),
            "det": max(
                abs(np.linalg.det(np.array([self.tau, self.nu, self.N])) - 1),
                abs(np.linalg.det(np.array([self.tau, self.nu_sigma, self.N_sigma])) - 1),
            ),
        }
        s = ip(self.N, self.nu_sigma)
        m = ip(self.N, self.N_sigma)
        errs["projection"] = abs(e * (m * m - s * s) + 1)
        return {k: float(v) for k, v in errs.items()}

    def check(self, tol: float = TAU_ORTH) -> None:
        bad = {k: v for k, v in self.invariant_errors().items() if v > tol}
        if bad:
            raise ValueError(f"boundary frame invariants violated: {bad}")
