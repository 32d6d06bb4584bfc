import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lorentz_capillary import mesh
from lorentz_capillary.lorentz_core import minkowski_inner
from lorentz_capillary.mesh import DegenerateMesh, SpacelikeViolation
from lorentz_capillary.umbilic import Pseudosphere

S2 = np.sqrt(2.0)
CAP_AREA = 2 * np.pi * (S2 - 1)
CAP_VOLUME = np.pi * (S2 - 2) / 3


def cap(n, sign=1):
    return mesh.build_graph(mesh.polar_disc(1.0, n), lambda x, y: sign * (np.sqrt(1 + x * x + y * y) - S2))


def bumpy(seed, n=8):
    a = np.random.default_rng(seed).uniform(-0.15, 0.15, size=5)

    def u(x, y):
        return a[0] * x + a[1] * y + a[2] * (x * x + y * y) + a[3] * np.sin(3 * x) * y + a[4] * np.cos(2 * y)

    return mesh.build_graph(mesh.polar_disc(1.0, n), u)


def circle_on_pseudosphere(t_of_phi, n):
    phi = 2 * np.pi * np.arange(n) / n
    t = t_of_phi(phi)
    return np.column_stack([np.cosh(t) * np.cos(phi), np.cosh(t) * np.sin(phi), np.sinh(t)])


# -- construction -------------------------------------------------------------


def test_flat_disc_graph():
    g = mesh.build_graph(mesh.polar_disc(1.0, 8), 0.0)
    assert np.all(g.heights == 0)
    assert len(g.boundary) == g.layout.n_sectors
    assert mesh.area(g) == pytest.approx(np.pi, rel=2e-2)
    assert mesh.algebraic_volume(g) == 0.0


def test_null_gradient_is_rejected():
    with pytest.raises(SpacelikeViolation) as err:
        mesh.build_graph(mesh.polar_disc(1.0, 8), lambda x, y: x)
    assert err.value.grad_norm == pytest.approx(1.0, abs=1e-9)


def test_degenerate_triangle_is_rejected():
    xy, tri, lay = mesh.polar_disc(1.0, 4)
    xy = xy.copy()
    xy[1] = xy[0]
    with pytest.raises(DegenerateMesh):
        mesh.build_graph((xy, tri, lay), 0.0)


def test_height_array_must_match_and_be_finite():
    dom = mesh.polar_disc(1.0, 4)
    with pytest.raises(ValueError):
        mesh.build_graph(dom, np.zeros(3))
    u = np.zeros(len(dom[0]))
    u[2] = np.nan
    with pytest.raises(ValueError):
        mesh.build_graph(dom, u)


def test_graphs_are_read_only():
    g = cap(6)
    with pytest.raises(ValueError):
        g.points[0, 2] = 1.0


def test_annulus_has_two_boundary_loops():
    g = mesh.build_graph(mesh.polar_annulus(0.5, 1.0, 6), 0.0)
    assert g.inner_boundary is not None
    assert len(g.interior) == g.n_vertices - len(g.boundary) - len(g.inner_boundary)
    assert mesh.center_mass_defect(g) == 0.0


# -- normals and curvature ----------------------------------------------------


def test_constant_height_normal_is_time_axis():
    g = mesh.build_graph(mesh.polar_disc(1.0, 6), 0.7)
    np.testing.assert_allclose(mesh.future_normal(g), np.tile([0, 0, 1.0], (g.n_vertices, 1)), atol=1e-14)
    np.testing.assert_allclose(mesh.mean_curvature(g), 0.0, atol=1e-12)


def test_cap_boundary_normal_tends_to_support_normal():
    errs = []
    for n in (16, 32):
        g = cap(n)
        k = g.boundary[0]
        assert np.allclose(g.points[k], [1, 0, 0], atol=1e-12)
        errs.append(np.linalg.norm(mesh.boundary_normals(g)[0] - [1, 0, S2]))
    assert errs[1] < errs[0] < 0.1


@given(st.integers(0, 10_000))
def test_normals_are_unit_and_future(seed):
    N = mesh.future_normal(bumpy(seed))
    assert np.max(np.abs(minkowski_inner(N, N) + 1)) < 1e-12
    assert np.all(N[:, 2] > 0)


@pytest.mark.parametrize("sign", [1, -1])
def test_cap_mean_curvature_sign(sign):
    H = mesh.mean_curvature(cap(64, sign))
    assert np.max(np.abs(H - sign)) < 5e-3


def test_cap_curvature_error_shrinks_quadratically():
    e32 = np.max(np.abs(mesh.mean_curvature(cap(32)) - 1))
    e64 = np.max(np.abs(mesh.mean_curvature(cap(64)) - 1))
    assert np.log2(e32 / e64) > 1.8


def test_center_dual_mass_is_positive_correction():
    d = mesh.center_mass_defect(cap(16))
    assert d > 0
    m = mesh.vertex_masses(cap(16))
    assert np.sum(m) == pytest.approx(np.sum(mesh.barycentric_masses(cap(16).points, cap(16).triangles)) - d)


# -- area and volume ----------------------------------------------------------


@pytest.mark.parametrize("n, tol", [(128, 1e-3), (256, 1e-4)])
def test_cap_area_and_volume_closed_forms(n, tol):
    g = cap(n)
    assert mesh.area(g) == pytest.approx(CAP_AREA, rel=tol)
    assert mesh.algebraic_volume(g) == pytest.approx(CAP_VOLUME, rel=tol)


@given(st.integers(0, 10_000), st.floats(-2, 2))
def test_vertical_translation(seed, c):
    g = bumpy(seed)
    h = g.with_heights(g.heights + c)
    mass = np.sum(mesh.vertex_masses(g))
    assert mesh.area(h) == pytest.approx(mesh.area(g), rel=1e-12)
    assert mesh.algebraic_volume(h) == pytest.approx(mesh.algebraic_volume(g) + c * mass, abs=1e-12)


@given(st.integers(0, 10_000))
def test_lorentz_area_below_planar_area(seed):
    g = bumpy(seed)
    assert mesh.area(g) < np.sum(mesh.planar_areas(g.points, g.triangles))


# -- boundary frames ----------------------------------------------------------


def test_flat_disc_meets_waist_orthogonally():
    S = Pseudosphere()
    fr = mesh.boundary_frames(mesh.build_graph(mesh.polar_disc(1.0, 16), 0.0, S), S)
    np.testing.assert_allclose(fr.contact, 0.0, atol=1e-12)


def test_cap_contact_angle_and_frame_invariants():
    S = Pseudosphere()
    g = cap(64)
    fr = mesh.boundary_frames(g, S, N=np.tile([0, 0, 0.0], (len(g.boundary), 1)) + _exact_cap_normals(g))
    np.testing.assert_allclose(fr.contact, 1.0, atol=1e-8)
    for k in range(0, len(fr), 7):
        fr.frame(k).check(1e-8)
    assert np.all(fr.ds > 0)


def _exact_cap_normals(g):
    X = g.points[g.boundary] - [0, 0, -S2]
    return X


def test_discrete_frames_satisfy_invariants():
    S = Pseudosphere()
    fr = mesh.boundary_frames(cap(32), S)
    for k in range(len(fr)):
        fr.frame(k).check(1e-8)
    assert np.max(np.abs(fr.contact - 1)) < 2e-2


def test_frames_reject_points_off_support():
    with pytest.raises(ValueError):
        mesh.boundary_frames(mesh.build_graph(mesh.polar_disc(0.9, 6), 0.0), Pseudosphere())


# -- wetted area --------------------------------------------------------------


def test_waist_has_no_wetted_area():
    S = Pseudosphere()
    assert mesh.wetted_area(mesh.build_graph(mesh.polar_disc(1.0, 8), 0.0, S), S) == pytest.approx(0, abs=1e-15)


@pytest.mark.parametrize("h", [0.1, 0.5, 1.0, -0.4])
def test_horizontal_slice_wetted_area(h):
    X = circle_on_pseudosphere(lambda p: np.full_like(p, np.arcsinh(h)), 4096)
    assert mesh.wetted_area_terms(X, Pseudosphere())[0] == pytest.approx(2 * np.pi * h, rel=1e-6)


def test_odd_boundary_wets_nothing():
    X = circle_on_pseudosphere(lambda p: 0.1 * np.cos(p), 4096)
    assert abs(mesh.wetted_area_terms(X, Pseudosphere())[0]) < 1e-10


def test_wetted_area_gradient_matches_finite_differences():
    S = Pseudosphere()
    X = circle_on_pseudosphere(lambda p: 0.2 + 0.1 * np.sin(2 * p), 40)
    _, G = mesh.wetted_area_terms(X, S)
    rng = np.random.default_rng(0)
    D = rng.normal(size=X.shape)
    h = 1e-6
    fd = (mesh.wetted_area_terms(X + h * D, S)[0] - mesh.wetted_area_terms(X - h * D, S)[0]) / (2 * h)
    assert np.sum(G * D) == pytest.approx(fd, rel=1e-6)


def test_winding_boundary_is_not_a_geodesic_graph():
    S = Pseudosphere()
    xy, tri, lay = mesh.polar_disc(1.0, 6)
    ring = lay.ring(6)
    xy = xy.copy()
    a, b = ring[3], ring[4]
    xy[[a, b]] = xy[[b, a]]
    with pytest.raises(ValueError):
        mesh._check_geodesic_graph(np.column_stack([xy[ring], np.zeros(len(ring))]), S)
