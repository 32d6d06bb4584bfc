import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from lorentz_capillary.lorentz_core import (
    LIGHTLIKE,
    SPACELIKE,
    TIMELIKE,
    BoundaryFrame,
    causal_character,
    frame_from_projections,
    hyperbolic_angle,
    is_future_directed,
    minkowski_inner,
    normalize,
    time_axis,
)

finite = st.floats(-1e3, 1e3, allow_nan=False)
vec3 = arrays(float, 3, elements=finite)


@pytest.mark.parametrize(
    "u, expected",
    [((0, 0, 1), -1.0), ((1, 0, 0), 1.0), ((np.sqrt(2), 0, 1), 1.0)],
)
def test_inner_examples(u, expected):
    assert minkowski_inner(u, u) == pytest.approx(expected, abs=1e-15)


def test_inner_dimension_mismatch():
    with pytest.raises(ValueError, match="dimension"):
        minkowski_inner([1, 0, 0], [1, 0, 0, 0])


@given(vec3, vec3, vec3, finite)
def test_inner_symmetric_bilinear(u, v, w, s):
    assert minkowski_inner(u, v) == minkowski_inner(v, u)
    lhs = minkowski_inner(s * u + v, w)
    rhs = s * minkowski_inner(u, w) + minkowski_inner(v, w)
    assert lhs == pytest.approx(rhs, rel=1e-9, abs=1e-6)


def test_inner_is_dimension_generic():
    v = np.array([1.0, 2.0, 3.0, 4.0])
    assert minkowski_inner(v, v) == 1 + 4 + 9 - 16
    assert minkowski_inner(time_axis(5), time_axis(5)) == -1


@pytest.mark.parametrize(
    "v, kind",
    [((0, 0, 1), TIMELIKE), ((1, 0, 1), LIGHTLIKE), ((3, 4, 0), SPACELIKE)],
)
def test_causal_character_examples(v, kind):
    assert causal_character(v) == kind


def test_causal_character_tolerance_is_explicit():
    v = (1.0, 0.0, 1.0 + 1e-6)
    assert causal_character(v, tol=1e-10) == TIMELIKE
    assert causal_character(v, tol=1e-5) == LIGHTLIKE


def test_causal_character_zero_vector():
    with pytest.raises(ValueError):
        causal_character((0, 0, 0))


@pytest.mark.parametrize("v, future", [((0, 0, 1), True), ((0, 0, -1), False), ((1, 0, np.sqrt(2)), True)])
def test_future_direction(v, future):
    assert is_future_directed(v) is future


def test_future_direction_needs_timelike():
    with pytest.raises(ValueError):
        is_future_directed((1, 0, 0))


def test_hyperbolic_angle_examples():
    N = time_axis(3)
    assert hyperbolic_angle(N, [1.0, 0.0, 0.0], 1) == 0.0
    Ns = np.array([np.sqrt(2), 0.0, -1.0])  # unit spacelike, <a, Ns> = 1
    assert hyperbolic_angle(N, Ns, 1) == pytest.approx(0.881373587019543, abs=1e-12)
    assert hyperbolic_angle(N, N, -1) == 0.0


@given(st.floats(-5, 5))
def test_hyperbolic_angle_round_trip_timelike_support(t):
    # N = a, N_S unit spacelike with <N, N_S> = sinh t
    N = time_axis(3)
    Ns = np.array([np.cosh(t), 0.0, -np.sinh(t)])
    theta = hyperbolic_angle(N, Ns, 1)
    assert np.sinh(theta) == pytest.approx(minkowski_inner(N, Ns), abs=1e-12 * np.cosh(t) ** 2)


@given(st.floats(0, 5))
def test_hyperbolic_angle_round_trip_spacelike_support(t):
    N = time_axis(3)
    Ns = np.array([np.sinh(t), 0.0, np.cosh(t)])
    theta = hyperbolic_angle(N, Ns, -1)
    assert theta >= 0
    assert -np.cosh(theta) == pytest.approx(minkowski_inner(N, Ns), rel=1e-12)


def test_hyperbolic_angle_impossible_pair():
    N = time_axis(3)
    with pytest.raises(ValueError, match="impossible"):
        hyperbolic_angle(N, [0.0, 0.0, -1.0], -1)


def _support_frame(eps, rng):
    """Random (tau, nu_S, N_S) with the right causal characters and det = +1."""
    b = rng.normal(size=3) * 0.5
    if eps == 1:
        # timelike support: N_S spacelike, nu_S timelike
        boost = b[0]
        nu_s = np.array([np.sinh(boost), 0.0, np.cosh(boost)])
        N_s = np.array([np.cosh(boost), 0.0, np.sinh(boost)])
    else:
        boost = b[0]
        N_s = np.array([np.sinh(boost), 0.0, np.cosh(boost)])
        nu_s = np.array([np.cosh(boost), 0.0, np.sinh(boost)])
    tau = np.array([0.0, 1.0, 0.0])
    if np.linalg.det(np.array([tau, nu_s, N_s])) < 0:
        nu_s = -nu_s
    return tau, nu_s, N_s


@given(st.integers(0, 10_000), st.sampled_from([1, -1]), st.floats(-4, 4))
def test_frame_from_projections_invariants(seed, eps, t):
    rng = np.random.default_rng(seed)
    tau, nu_s, N_s = _support_frame(eps, rng)
    if eps == 1:
        m, s = np.sinh(t), np.cosh(t)
    else:
        m, s = -np.cosh(t), np.sinh(t)
    N, nu = frame_from_projections(s, m, nu_s, N_s, eps)
    assert minkowski_inner(N, N) == pytest.approx(-1, abs=1e-8 * np.cosh(t) ** 2)
    assert minkowski_inner(nu, nu) == pytest.approx(1, abs=1e-8 * np.cosh(t) ** 2)
    assert minkowski_inner(N, nu) == pytest.approx(0, abs=1e-8 * np.cosh(t) ** 2)
    assert minkowski_inner(N, tau) == pytest.approx(0, abs=1e-12)
    assert eps * (m * m - s * s) == pytest.approx(-1, abs=1e-8 * np.cosh(t) ** 2)


def test_frame_from_projections_examples():
    nu_s, N_s = np.array([0.0, 0.0, 1.0]), np.array([1.0, 0.0, 0.0])
    N, nu = frame_from_projections(1.0, 0.0, nu_s, N_s, 1)
    np.testing.assert_allclose(N, -nu_s)
    np.testing.assert_allclose(nu, N_s)
    nu_s, N_s = np.array([1.0, 0.0, 0.0]), np.array([0.0, 0.0, 1.0])
    N, nu = frame_from_projections(0.0, -1.0, nu_s, N_s, -1)
    np.testing.assert_allclose(N, N_s)
    np.testing.assert_allclose(nu, nu_s)


def test_frame_from_projections_rejects_inconsistent_data():
    with pytest.raises(ValueError, match="inconsistent"):
        frame_from_projections(0.3, 0.3, [0, 0, 1], [1, 0, 0], 1)


def test_boundary_frame_check():
    tau = np.array([0.0, 1.0, 0.0])
    fr = BoundaryFrame(tau, np.array([-1.0, 0, 0]), np.array([0, 0, 1.0]), np.array([0, 0, 1.0]),
                       np.array([1.0, 0, 0]), 1)
    assert max(fr.invariant_errors().values()) < 1e-14
    bad = BoundaryFrame(tau, np.array([-1.0, 0, 0]), np.array([0, 0, 2.0]), np.array([0, 0, 1.0]),
                        np.array([1.0, 0, 0]), 1)
    with pytest.raises(ValueError, match="invariants"):
        bad.check()
