"""Data checks for the structural statements: spacelike closed curves on the
unit pseudosphere project onto the waist as coverings, and compact stationary
graphs lie on one side of a plane or hyperbolic plane containing their boundary.

Each check returns a report with a witness on failure, so discretisation
artefacts can be told from genuine violations by refining.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from shapely.geometry import LinearRing

from . import mesh
from .lorentz_core import minkowski_inner, time_axis
from .mesh import SpacelikeGraph
from .umbilic import HyperbolicPlane, geodesic_param, waist_point

A = time_axis(3)
TOL_ON_S = 1e-9
TOL_NULL = 1e-10  # <a', a'> below this times |a'|^2 counts as not spacelike
TOL_IDENTITY = 1e-8
TOL_HEIGHT = 1e-8
TOL_H = 1e-6

# 8th-order centred first derivative
_D8 = np.array([1 / 280, -4 / 105, 1 / 5, -4 / 5, 0.0, 4 / 5, -1 / 5, 4 / 105, -1 / 280])


def periodic_derivative(F, period: float = 2 * np.pi) -> np.ndarray:
    """d/ds of periodic samples F[k] = f(period * k / K)."""
    F = np.asarray(F, dtype=float)
    h = period / len(F)
    out = np.zeros_like(F)
    for w, off in zip(_D8, range(-4, 5)):
        if w:
            out += w * np.roll(F, -off, axis=0)
    return out / h


@dataclass(frozen=True, eq=False)
class SampledCurve:
    """Closed curve on the unit pseudosphere sampled at s_k = 2 pi k / K."""

    points: np.ndarray

    def __post_init__(self):
        X = np.asarray(self.points, dtype=float)
        if X.ndim != 2 or X.shape[1] != 3 or len(X) < 16:
            raise ValueError("need at least 16 samples in L^3")
        res = np.abs(minkowski_inner(X, X) - 1.0)
        if np.max(res) > TOL_ON_S:
            raise ValueError(f"sample {int(np.argmax(res))} is off the pseudosphere by {np.max(res):.3g}")
        object.__setattr__(self, "points", X)

    def __len__(self):
        return len(self.points)

    def tangents(self) -> np.ndarray:
        return periodic_derivative(self.points)

    def projection(self) -> np.ndarray:
        """psi = pi(alpha) on the waist."""
        X = self.points
        w = minkowski_inner(X, A)
        return (X + w[:, None] * A) / np.sqrt(1 + w * w)[:, None]

    @classmethod
    def geodesic_graph(cls, t, n: int = 2048, turns: int = 1) -> "SampledCurve":
        """{F(t(phi), q(phi))}; ``turns`` > 1 wraps the waist several times, so
        ``t`` must then be periodic in ``2 pi turns``."""
        s = 2 * np.pi * np.arange(n) / n
        phi = turns * s
        return cls(geodesic_param(t(phi), waist_point(phi)))

    @classmethod
    def plane_section(cls, slope: float, direction: float = 0.0, height: float = 0.0, n: int = 2048) -> "SampledCurve":
        """S^2_1 cut by x3 = slope (x1 cos d + x2 sin d) + height, |slope| < 1."""
        if abs(slope) >= 1:
            raise ValueError("|slope| < 1 is needed for a spacelike (closed) section")
        c = lambda phi: slope * np.cos(phi - direction)  # noqa: E731
        # sinh t - c cosh t = height
        return cls.geodesic_graph(lambda phi: np.arctanh(c(phi)) + np.arcsinh(height / np.sqrt(1 - c(phi) ** 2)), n)


def waist_curve(n: int = 2048) -> SampledCurve:
    return SampledCurve.geodesic_graph(lambda phi: np.zeros_like(phi), n)


def random_spacelike_curve(rng: np.random.Generator, n: int = 2048) -> SampledCurve:
    """Random plane section or random geodesic graph with |t'| < 0.9."""
    if rng.random() < 0.5:
        return SampledCurve.plane_section(rng.uniform(-0.95, 0.95), rng.uniform(0, 2 * np.pi), rng.normal(0, 0.7), n)
    m = rng.integers(1, 5)
    a = rng.normal(size=(m, 2))
    k = np.arange(1, m + 1)
    scale = 0.9 / np.sum(np.abs(a) @ np.ones(2) * k) * rng.uniform(0.2, 1.0)
    shift = rng.normal(0, 0.7)

    def t(phi):
        return shift + scale * (a[:, 0] @ np.cos(np.outer(k, phi)) + a[:, 1] @ np.sin(np.outer(k, phi)))

    return SampledCurve.geodesic_graph(t, n)


def _winding(xy) -> int:
    ang = np.arctan2(xy[:, 1], xy[:, 0])
    d = np.diff(np.append(ang, ang[0]))
    d = (d + np.pi) % (2 * np.pi) - np.pi
    return int(np.rint(np.sum(d) / (2 * np.pi)))


def _is_simple(xy) -> bool:
    return bool(LinearRing(xy).is_simple)


# -- covering --------------------------------------------------------------------


@dataclass
class CoveringReport:
    ok: bool
    winding: int
    identity_error: float  # corrected norm identity, relative
    printed_gap: float  # max of <psi',psi'>(1 + <alpha,a>^2) - <alpha',alpha'>, relative
    min_speed2: float
    embedded: bool
    geodesic_graph: bool
    witness: int | None = None
    reason: str = ""

    def verdict(self) -> str:
        return _verdict("covering", self.ok, self.witness, self.reason, tol=TOL_IDENTITY, winding=self.winding,
                        identity_error=self.identity_error, printed_gap=self.printed_gap,
                        embedded=self.embedded, geodesic_graph=self.geodesic_graph)


def check_covering(curve: SampledCurve) -> CoveringReport:
    """pi o alpha is a local diffeomorphism onto the waist C, hence a covering.

    Pointwise, with w = <alpha, a>,
        <psi', psi'> (1 + w^2) = <alpha', alpha'> + <alpha', a>^2 / (1 + w^2),
    so a spacelike alpha gives <psi', psi'> > 0.  The check evaluates both sides
    by finite differences, the winding number of psi, and whether the embedded
    curve is a graph over C.
    """
    X = curve.points
    T = curve.tangents()
    speed2 = minkowski_inner(T, T)
    scale = np.sum(T * T, axis=1)
    bad = speed2 <= TOL_NULL * scale
    psi = curve.projection()
    if np.any(bad):
        k = int(np.flatnonzero(bad)[np.argmin(speed2[bad])])
        return CoveringReport(False, _winding(psi[:, :2]), np.nan, np.nan, float(np.min(speed2)), False, False, k,
                              "tangent is null or timelike (hypothesis fails)")
    dpsi = periodic_derivative(psi)
    w = minkowski_inner(X, A)
    lhs = minkowski_inner(dpsi, dpsi) * (1 + w * w)
    wa = minkowski_inner(T, A)
    rhs = speed2 + wa * wa / (1 + w * w)
    err = np.abs(lhs - rhs) / scale
    printed = (lhs - speed2) / scale
    winding = _winding(psi[:, :2])
    # the map (t, phi) -> e^t (cos phi, sin phi) is a diffeomorphism of S^2_1
    # onto the punctured plane, so embeddedness is planar simplicity there
    t = np.arcsinh(X[:, 2])
    embedded = _is_simple(np.exp(t)[:, None] * psi[:, :2])
    ok = bool(np.max(err) < TOL_IDENTITY and winding != 0)
    if embedded:
        ok = ok and abs(winding) == 1
    witness = None if ok else int(np.argmax(err))
    return CoveringReport(ok, winding, float(np.max(err)), float(np.max(printed)), float(np.min(speed2)),
                          embedded, bool(embedded and abs(winding) == 1), witness,
                          "" if ok else "norm identity or winding failed")


# -- graph on the plane ------------------------------------------------------------


@dataclass
class PlaneGraphReport:
    ok: bool
    simple: bool
    winding: int
    min_separation: float
    witness: tuple[int, int] | None = None
    reason: str = ""

    def verdict(self) -> str:
        return _verdict("graph-on-plane", self.ok, self.witness, self.reason, simple=self.simple,
                        winding=self.winding, min_separation=self.min_separation)


def check_graph_on_plane(curve: SampledCurve, tol: float = 1e-12) -> PlaneGraphReport:
    """Vertical projection onto {x3 = 0} is injective on the samples and its image
    is a simple closed curve winding once around an interior point."""
    xy = curve.points[:, :2]
    d2 = np.sum((xy[:, None, :] - xy[None, :, :]) ** 2, axis=-1)
    np.fill_diagonal(d2, np.inf)
    i, j = np.unravel_index(np.argmin(d2), d2.shape)
    sep = float(np.sqrt(d2[i, j]))
    if sep <= tol:
        return PlaneGraphReport(False, False, 0, sep, (int(min(i, j)), int(max(i, j))),
                                "two samples share a vertical projection")
    simple = _is_simple(xy)
    winding = _winding(xy - xy.mean(axis=0))
    ok = simple and abs(winding) == 1
    return PlaneGraphReport(ok, simple, winding, sep, None, "" if ok else "projection is not a simple loop")


def with_mirror_sample(curve: SampledCurve, k: int) -> SampledCurve:
    """Control input: insert, after sample k, the point with the same planar
    projection on the other side of the waist."""
    X = curve.points
    m = X[k] * np.array([1.0, 1.0, -1.0])
    return SampledCurve(np.insert(X, k + 1, m, axis=0))


# -- one-side theorems ---------------------------------------------------------------

ABOVE, BELOW, CONTAINED, VIOLATION, NO_HYPOTHESIS = "above", "below", "contained", "violation", "no-hypothesis"


@dataclass
class OneSideReport:
    check: str
    verdict_kind: str
    H_min: float
    H_max: float
    value_min: float
    value_max: float
    witness: int | None = None
    tol: float = TOL_HEIGHT

    @property
    def ok(self) -> bool:
        return self.verdict_kind in (ABOVE, BELOW, CONTAINED)

    def verdict(self) -> str:
        return _verdict(self.check, self.ok, self.witness, self.verdict_kind, tol=self.tol,
                        H_min=self.H_min, H_max=self.H_max, value_min=self.value_min, value_max=self.value_max)


def _one_side(check, values, boundary_values, H, target, tol, H_tol):
    if np.max(np.abs(boundary_values)) > max(tol, 1e-9):
        raise ValueError("boundary is not on the reference surface")
    Hmin, Hmax = float(np.min(H)), float(np.max(H))
    vmin, vmax = float(np.min(values)), float(np.max(values))
    k = int(np.argmax(np.abs(values)))
    if abs(values[k]) < tol:
        return OneSideReport(check, CONTAINED, Hmin, Hmax, vmin, vmax, None, tol)
    dev = np.abs(H) - target
    if np.max(np.abs(dev)) < H_tol:
        return OneSideReport(check, VIOLATION, Hmin, Hmax, vmin, vmax, k, tol)
    if not (np.all(dev > H_tol) or np.all(dev < -H_tol)) or (target == 0 and Hmin * Hmax <= 0):
        return OneSideReport(check, NO_HYPOTHESIS, Hmin, Hmax, vmin, vmax, int(np.argmin(np.abs(dev))), tol)
    if vmin > 0:
        return OneSideReport(check, ABOVE, Hmin, Hmax, vmin, vmax, None, tol)
    if vmax < 0:
        return OneSideReport(check, BELOW, Hmin, Hmax, vmin, vmax, None, tol)
    k = int(np.argmin(values)) if abs(vmin) < abs(vmax) else int(np.argmax(values))
    return OneSideReport(check, VIOLATION, Hmin, Hmax, vmin, vmax, k, tol)


def check_one_side_plane(g: SpacelikeGraph, tol: float = TOL_HEIGHT, H_tol: float = TOL_H) -> OneSideReport:
    """Boundary in {x3 = 0}: non-vanishing H puts the interior strictly on one
    side; H = 0 puts it in the plane.  The witness is an interior vertex index."""
    I = g.interior
    H = mesh.mean_curvature(g)[I]
    return _one_side("one-side-plane", g.heights[I], g.heights[g.boundary], H, 0.0, tol, H_tol)


def foliation_parameter(X, Hn: HyperbolicPlane) -> np.ndarray:
    """t with x on the translate Hn + t a (same branch)."""
    X = np.asarray(X, dtype=float)
    d = X - Hn.p
    rho2 = d[..., 0] ** 2 + d[..., 1] ** 2
    return d[..., 2] - Hn.branch * np.sqrt(Hn.r**2 + rho2)


def check_one_side_hyperbolic(g: SpacelikeGraph, Hn: HyperbolicPlane, tol: float = TOL_HEIGHT,
                              H_tol: float = TOL_H) -> OneSideReport:
    """Boundary on Hn: |H| != 1/r puts the interior strictly on one side of Hn,
    measured by the leaf parameter of the foliation {Hn + t a}; |H| = 1/r
    everywhere puts it inside Hn.  'above' means t > 0."""
    if not isinstance(Hn, HyperbolicPlane):
        raise ValueError("reference surface must be a hyperbolic plane")
    t = foliation_parameter(g.points, Hn)
    I = g.interior
    H = mesh.mean_curvature(g)[I]
    return _one_side("one-side-hyperbolic", t[I], t[g.boundary], H, 1.0 / Hn.r, tol, H_tol)


def check_one_side_profile(profile, reference=None, tol: float = TOL_HEIGHT) -> OneSideReport:
    """One-side check along a rotational CMC profile in any dimension.  Heights
    (or leaf parameters for a hyperbolic ``reference`` centred on the axis) are
    shifted so the outer end sits on the reference; the inner samples are the
    interior."""
    rho, u = np.asarray(profile.rho), np.asarray(profile.u)
    if reference is None:
        vals = u - u[-1]
        target = 0.0
    else:
        X = np.column_stack([rho, np.zeros_like(rho), u])
        t = foliation_parameter(X, reference)
        vals = t - t[-1]
        target = 1.0 / reference.r
    H = np.full(len(rho) - 1, profile.H)
    return _one_side("one-side-profile", vals[:-1], vals[-1:], H, target, tol, TOL_H)


# -- text verdicts --------------------------------------------------------------------


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.6g}"
    if v is None:
        return "-"
    if isinstance(v, tuple):
        return ",".join(map(str, v))
    return str(v).lower() if isinstance(v, bool) else str(v)


def _verdict(name, ok, witness, reason, **extra) -> str:
    parts = [f"check={name}", f"result={'pass' if ok else 'fail'}", f"witness={_fmt(witness)}"]
    parts += [f"{k}={_fmt(v)}" for k, v in extra.items()]
    if reason:
        parts.append(f"note={reason.replace(' ', '_')}")
    return " ".join(parts)


@dataclass
class SuiteResult:
    name: str
    lines: list = field(default_factory=list)
    passed: list = field(default_factory=list)

    def add(self, line: str, ok: bool):
        self.lines.append(line)
        self.passed.append(bool(ok))

    @property
    def ok(self) -> bool:
        return all(self.passed)

    def text(self) -> str:
        return "\n".join(self.lines + [f"suite={self.name} result={'pass' if self.ok else 'fail'} "
                                       f"passed={sum(self.passed)}/{len(self.passed)}"])
