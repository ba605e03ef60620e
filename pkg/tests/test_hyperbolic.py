import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qsmass.hyperbolic import (
    HyperboloidPoint,
    ball_to_hyperboloid,
    basis,
    from_polar,
    geodesic_distance,
    hyperboloid_to_ball,
    lorentz_dot,
    normal_flow,
    origin,
    radial_direction,
    to_polar,
)


def unit(v):
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v)


directions = st.lists(st.floats(-1, 1), min_size=3, max_size=3).filter(
    lambda v: np.linalg.norm(v) > 0.1
)


def test_lorentz_basis():
    n = 4
    e0, e1 = basis(n, 0), basis(n, 1)
    assert lorentz_dot(e0, e0) == -1.0
    assert lorentz_dot(e1, e1) == 1.0
    assert lorentz_dot(e1, e0) == 0.0


def test_lorentz_dimension_mismatch():
    with pytest.raises(ValueError):
        lorentz_dot(np.ones(3), np.ones(4))


def test_point_on_hyperboloid_has_norm_minus_one():
    p = from_polar(0.7, unit([1, 2, 3]), 1.0)
    assert lorentz_dot(p.coords, p.coords) == pytest.approx(-1.0, abs=1e-14)


def test_from_polar_examples():
    p = from_polar(0.0, unit([0, 1, 0]), 1.0)
    np.testing.assert_allclose(p.coords, [0, 0, 0, 1])
    p = from_polar(1.0, [1.0, 0, 0], 1.0)
    np.testing.assert_allclose(p.coords, [np.sinh(1), 0, 0, np.cosh(1)])


@given(st.floats(0.01, 5), directions, st.sampled_from([0.5, 1.0, 2.0]))
def test_polar_round_trip(r, y, k):
    Y = unit(y)
    r2, Y2 = to_polar(from_polar(r, Y, k))
    assert r2 == pytest.approx(r, rel=1e-9, abs=1e-9)
    np.testing.assert_allclose(Y2, Y, atol=1e-9)


def test_ball_examples():
    np.testing.assert_allclose(ball_to_hyperboloid([0, 0, 0], 1.0).coords, [0, 0, 0, 1])
    np.testing.assert_allclose(
        ball_to_hyperboloid([0.5, 0, 0], 1.0).coords, [4 / 3, 0, 0, 5 / 3], rtol=1e-14
    )
    with pytest.raises(ValueError):
        ball_to_hyperboloid([1.0, 0, 0], 1.0)


@settings(max_examples=200)
@given(st.floats(0.0, 0.999), directions, st.sampled_from([0.5, 1.0, 2.0]))
def test_ball_round_trip_and_distance(s, y, k):
    x = s * unit(y)
    p = ball_to_hyperboloid(x, k)
    np.testing.assert_allclose(hyperboloid_to_ball(p), x, atol=1e-12)
    # radial distance in the Poincare ball: int_0^s 2/(1-t^2) dt = ln((1+s)/(1-s))
    d = geodesic_distance(p, HyperboloidPoint(origin(3, k), k))
    assert d == pytest.approx(np.log((1 + s) / (1 - s)) / k, rel=1e-9, abs=1e-9)


def test_distance_from_origin_is_polar_radius():
    k = 1.3
    o = HyperboloidPoint(origin(3, k), k)
    for r in [0.1, 1.0, 3.0]:
        assert geodesic_distance(o, from_polar(r, unit([1, -1, 2]), k)) == pytest.approx(r, rel=1e-12)
    p = from_polar(0.4, unit([1, 1, 1]), k)
    assert geodesic_distance(p, p) == pytest.approx(0.0, abs=1e-7)


def test_distance_rejects_mixed_curvature():
    with pytest.raises(ValueError):
        geodesic_distance(from_polar(1, [1, 0, 0], 1.0), from_polar(1, [1, 0, 0], 2.0))


@settings(max_examples=100)
@given(
    st.lists(st.floats(0, 3), min_size=3, max_size=3),
    st.lists(directions, min_size=3, max_size=3),
)
def test_triangle_inequality(rs, ys):
    pts = [from_polar(r, unit(y), 1.0) for r, y in zip(rs, ys)]
    a, b, c = pts
    assert geodesic_distance(a, c) <= geodesic_distance(a, b) + geodesic_distance(b, c) + 1e-8


def test_same_ray_distance():
    Y = unit([0.3, -0.2, 0.9])
    d = geodesic_distance(from_polar(0.5, Y, 1.0), from_polar(2.25, Y, 1.0))
    assert d == pytest.approx(1.75, rel=1e-12)


def test_normal_flow_identity_and_spheres():
    k = 0.8
    Y = unit([1, 2, -1])
    p = from_polar(1.1, Y, k)
    N = radial_direction(p.coords, k)
    q, N0 = normal_flow(p, N, 0.0)
    np.testing.assert_allclose(q.coords, p.coords)
    np.testing.assert_allclose(N0, N)
    q, Nq = normal_flow(p, N, 0.9)
    np.testing.assert_allclose(q.coords, from_polar(2.0, Y, k).coords, rtol=1e-13)
    np.testing.assert_allclose(Nq, radial_direction(q.coords, k), rtol=1e-12)


@settings(max_examples=100)
@given(st.floats(0, 2), directions, directions, st.floats(-2, 3), st.floats(-2, 3))
def test_normal_flow_invariants_and_group(r, y, w, rho1, rho2):
    k = 1.0
    p = from_polar(r, unit(y), k)
    X = p.coords
    # a random unit normal: Lorentz-orthogonal projection of a spatial vector
    v = np.append(unit(w), 0.0)
    v = v + lorentz_dot(v, X) * k * k * X
    if lorentz_dot(v, v) < 1e-6:
        return
    N = v / np.sqrt(lorentz_dot(v, v))
    q, Nq = normal_flow(p, N, rho1)
    assert lorentz_dot(Nq, Nq) == pytest.approx(1.0, abs=1e-9 * max(1, np.abs(Nq).max() ** 2))
    assert abs(lorentz_dot(q.coords, Nq)) < 1e-9 * max(1, np.abs(Nq).max() ** 2)
    q2, N2 = normal_flow(q, Nq, rho2)
    q3, N3 = normal_flow(p, N, rho1 + rho2)
    np.testing.assert_allclose(q2.coords, q3.coords, rtol=1e-12, atol=1e-12 * np.abs(q3.coords).max())
    np.testing.assert_allclose(N2, N3, rtol=1e-12, atol=1e-12 * np.abs(N3).max())


def test_normal_flow_rejects_bad_normal():
    p = from_polar(1.0, [1.0, 0, 0], 1.0)
    with pytest.raises(ValueError):
        normal_flow(p, np.array([0, 0, 0, 1.0]), 1.0)


def test_invalid_point_rejected():
    with pytest.raises(ValueError):
        HyperboloidPoint(np.array([1.0, 0, 0, 1.0]), 1.0)
