import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lorentz_capillary import umbilic as U
from lorentz_capillary.lorentz_core import is_future_directed, minkowski_inner

A = np.array([0.0, 0.0, 1.0])
S1 = U.Pseudosphere()


def test_surface_normal_examples():
    np.testing.assert_allclose(U.surface_normal(S1, [1.0, 0.0, 0.0]), [1, 0, 0])
    Hp = U.HyperbolicPlane([0.0, 0.0, -np.sqrt(2)], 1.0, 1)
    np.testing.assert_allclose(U.surface_normal(Hp, [1.0, 0.0, 0.0]), [1, 0, np.sqrt(2)], atol=1e-15)
    P = U.SpacelikePlane(np.zeros(3), A)
    np.testing.assert_allclose(U.surface_normal(P, [3.0, -2.0, 0.0]), A)


def test_surface_normal_rejects_points_off_the_surface():
    with pytest.raises(ValueError):
        U.surface_normal(S1, [2.0, 0.0, 0.0])


@pytest.mark.parametrize("branch", [1, -1])
def test_hyperbolic_normals_are_future_unit(branch, rng):
    Hp = U.HyperbolicPlane([0.3, -0.2, 0.5], 2.0, branch)
    xy = rng.normal(size=(64, 2))
    z = Hp.p[2] + branch * np.sqrt(4.0 + np.sum((xy - Hp.p[:2]) ** 2, axis=1))
    X = np.column_stack([xy, z])
    N = U.surface_normal(Hp, X)
    np.testing.assert_allclose(minkowski_inner(N, N), -1, atol=1e-12)
    assert all(is_future_directed(n) for n in N)


def test_mean_curvature_analytic():
    assert U.mean_curvature_analytic(U.SpacelikePlane()) == 0
    assert U.mean_curvature_analytic(U.HyperbolicPlane(np.zeros(3), 2.0, 1)) == 0.5
    assert U.mean_curvature_analytic(U.HyperbolicPlane(np.zeros(3), 2.0, -1)) == -0.5
    assert U.mean_curvature_analytic(S1) is None


def test_geodesic_param_examples():
    q = np.array([1.0, 0.0, 0.0])
    np.testing.assert_allclose(U.geodesic_param(0.0, q), q)
    t = 0.7
    np.testing.assert_allclose(U.geodesic_param(t, q), [np.cosh(t), 0, np.sinh(t)])
    v = U.geodesic_velocity(t, q)
    assert minkowski_inner(v, v) == pytest.approx(-1)


def test_geodesic_param_rejects_points_off_the_waist():
    with pytest.raises(ValueError):
        U.geodesic_param(0.1, [1.0, 0.0, 0.2])


@given(st.floats(-4, 4), st.floats(0, 2 * np.pi))
def test_geodesic_round_trip(t, phi):
    q = U.waist_point(phi)
    F = U.geodesic_param(t, q)
    assert minkowski_inner(F, F) == pytest.approx(1, abs=1e-12 * np.cosh(t) ** 2)
    np.testing.assert_allclose(U.project_pi(F), q, atol=1e-12)


def test_project_pi_examples():
    q = U.waist_point(0.4)
    np.testing.assert_allclose(U.project_pi(q), q)
    np.testing.assert_allclose(U.project_pi([np.sqrt(2), 0, 1]), [1, 0, 0], atol=1e-15)
    np.testing.assert_allclose(U.project_pi([np.cosh(2), 0, np.sinh(2)]), [1, 0, 0], atol=1e-15)


def test_project_pi_differential_examples():
    q = U.waist_point(1.0)
    v = np.array([-np.sin(1.0), np.cos(1.0), 0.0])
    np.testing.assert_allclose(U.project_pi_differential(q, v), v, atol=1e-15)
    d = U.project_pi_differential([np.sqrt(2), 0, 1], [0, 1, 0])
    np.testing.assert_allclose(d, [0, 1 / np.sqrt(2), 0], atol=1e-15)


@given(st.floats(-2, 2), st.floats(0, 2 * np.pi), st.floats(-1, 1), st.floats(-1, 1))
def test_project_pi_differential_matches_finite_differences(t, phi, a, b):
    p = U.geodesic_param(t, U.waist_point(phi))
    # tangent basis at p: the geodesic velocity and the rotation field
    e1 = U.geodesic_velocity(t, U.waist_point(phi))
    e2 = np.array([-p[1], p[0], 0.0])
    v = a * e1 + b * e2

    def curve(s):
        # a curve on S^2_1 through p with velocity v
        return U.geodesic_param(t + a * s, U.waist_point(phi + b * s))

    h = 1e-5
    fd = (U.project_pi(curve(h)) - U.project_pi(curve(-h))) / (2 * h)
    np.testing.assert_allclose(U.project_pi_differential(p, v), fd, atol=1e-7)


@given(st.floats(-2, 2), st.floats(0, 2 * np.pi), st.floats(0.1, 1))
def test_differential_norm_identity_for_horizontal_vectors(t, phi, b):
    # the printed identity holds for tangent vectors with <v, a> = 0
    p = U.geodesic_param(t, U.waist_point(phi))
    v = b * np.array([-p[1], p[0], 0.0])
    d = U.project_pi_differential(p, v)
    w = minkowski_inner(p, A)
    assert minkowski_inner(d, d) * (1 + w * w) == pytest.approx(minkowski_inner(v, v), rel=1e-12)


def test_project_pi_differential_needs_tangent_vector():
    with pytest.raises(ValueError, match="tangent"):
        U.project_pi_differential([1.0, 0.0, 0.0], [1.0, 0.0, 0.0])


@pytest.mark.parametrize(
    "M, expected",
    [
        (U.plane_through(0.3), -0.3),
        (U.plane_through(0.0), 0.0),
        (U.HyperbolicPlane([0.0, 0.0, -np.sqrt(2)], 1.0, 1), 1.0),
    ],
)
def test_analytic_contact_angle_examples(M, expected):
    assert U.analytic_contact_angle(M) == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize(
    "M",
    [
        U.plane_through(0.5),
        U.plane_through(-0.2, (0.3, -0.4)),
        U.HyperbolicPlane([0.0, 0.0, -1.2], 1.0, 1),
        U.HyperbolicPlane([0.1, -0.2, 1.5], 0.8, -1),
    ],
)
def test_analytic_contact_angle_matches_sampled_normals(M):
    X, _ = U.sample_intersection(M, 64)
    val = minkowski_inner(M.normal(X), S1.normal(X))
    np.testing.assert_allclose(val, U.analytic_contact_angle(M), atol=1e-12)


def test_contact_angle_on_scaled_pseudosphere():
    S = U.Pseudosphere([0.2, -0.1, 0.3], 2.0)
    M = U.plane_through(0.9)
    X, _ = U.sample_intersection(M, 32, S)
    np.testing.assert_allclose(minkowski_inner(M.normal(X), S.normal(X)), U.analytic_contact_angle(M, S), atol=1e-12)


@pytest.mark.parametrize("c, r, z", [(np.sqrt(2), 1.0, 0.0), (-np.sqrt(2), 1.0, 0.0), (2.0, 1.0, 0.5)])
def test_cap_boundary_height(c, r, z):
    h = U.cap_boundary_height(c, r)
    assert h == pytest.approx(z, abs=1e-15)
    rho2 = 1 + h * h
    # the circle lies on both quadrics
    assert rho2 - (h - c) ** 2 == pytest.approx(-r * r)


def test_cap_boundary_height_rejects_zero_centre():
    with pytest.raises(ValueError):
        U.cap_boundary_height(0.0, 1.0)


def test_support_config_round_trip():
    for S in (U.plane_through(0.2, (0.1, 0.0)), U.HyperbolicPlane([0, 0, 1.0], 2.0, -1), U.Pseudosphere([1, 0, 0], 3)):
        T = U.support_from_config(S.to_config())
        assert T.kind == S.kind
        np.testing.assert_allclose(T.p, S.p)


def test_plane_must_be_spacelike():
    with pytest.raises(ValueError):
        U.plane_through(0.0, (1.0, 0.0))
    with pytest.raises(ValueError):
        U.SpacelikePlane(np.zeros(3), [1.0, 0.0, 0.0])


def test_chart_round_trip(rng):
    for S in (S1, U.plane_through(0.1, (0.2, 0.1)), U.HyperbolicPlane([0, 0, -1.0], 1.5, 1)):
        a = rng.uniform(0.2, 0.9, 16)
        phi = np.sort(rng.uniform(0, 2 * np.pi, 16))
        X = U.chart_point(S, a, phi)[0]
        assert U.on_surface(S, X)
        a2, phi2 = U.chart_coords(S, X)
        np.testing.assert_allclose(a2, a, atol=1e-12)
        np.testing.assert_allclose(np.mod(phi2, 2 * np.pi), phi, atol=1e-12)
