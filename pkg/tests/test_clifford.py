import numpy as np
import pytest

from qsmass.clifford import (
    G1,
    G2,
    T,
    a_of_null,
    anticommutation_residual,
    build_clifford,
    dirac_identity_check,
    killing_spinor,
    random_ball_points,
    random_null_directions,
    random_spinors,
    selfadjoint_residual,
    verify_norm_identity,
    zeta_of_a,
)
from qsmass.hyperbolic import lorentz_dot


@pytest.mark.parametrize("n", range(2, 10))
def test_anticommutation_and_hermiticity(n):
    rep = build_clifford(n)
    assert rep.dim == 2 ** (n // 2)
    assert anticommutation_residual(rep) < 1e-13
    assert selfadjoint_residual(rep) < 1e-13


def test_base_matrices():
    np.testing.assert_array_equal(build_clifford(2).matrices[0], np.diag([1j, -1j]))
    np.testing.assert_array_equal(build_clifford(2).matrices[1], [[0, 1j], [1j, 0]])
    m3 = build_clifford(3).matrices
    np.testing.assert_array_equal(m3[0], G1)
    np.testing.assert_array_equal(m3[1], G2)
    np.testing.assert_array_equal(m3[2], 1j * T)


def test_n1_rejected():
    with pytest.raises(ValueError):
        build_clifford(1)


def test_zeta_examples():
    rep = build_clifford(3)
    np.testing.assert_allclose(zeta_of_a(rep, [1, 0]), [-1, 0, 0, 1])
    np.testing.assert_allclose(zeta_of_a(rep, [0, 0]), [0, 0, 0, 0])
    a = np.array([0.3 - 0.1j, 0.7 + 0.2j])
    lam = 1.7 - 0.4j
    np.testing.assert_allclose(zeta_of_a(rep, lam * a), abs(lam) ** 2 * zeta_of_a(rep, a))


def test_n2_base_case():
    rep = build_clifford(2)
    a = a_of_null(rep, [1.0, 0.0, 1.0])
    np.testing.assert_allclose(a, [0, 1], atol=1e-15)
    np.testing.assert_allclose(zeta_of_a(rep, a), [1, 0, 1])


def test_n3_pole_direction():
    rep = build_clifford(3)
    a = a_of_null(rep, [0.0, 0.0, 1.0, 1.0])
    assert np.linalg.norm(a) == pytest.approx(1.0)
    np.testing.assert_allclose(zeta_of_a(rep, a), [0, 0, 1, 1], atol=1e-15)
    # (1, i)/sqrt2 is the antipodal representative under this inner-product convention
    np.testing.assert_allclose(zeta_of_a(rep, np.array([1, 1j]) / np.sqrt(2)), [0, 0, -1, 1], atol=1e-15)


@pytest.mark.parametrize("n", range(2, 9))
def test_null_round_trip(n):
    rep = build_clifford(n)
    rng = np.random.default_rng(n)
    for zeta in random_null_directions(n, 100, rng):
        a = a_of_null(rep, zeta)
        assert np.linalg.norm(a) == pytest.approx(1.0, abs=1e-12)
        assert np.linalg.norm(zeta_of_a(rep, a) - zeta) < 1e-10


def test_a_of_null_rejects_non_null():
    with pytest.raises(ValueError):
        a_of_null(build_clifford(3), [0.5, 0, 0, 1])
    with pytest.raises(ValueError):
        a_of_null(build_clifford(3), [1, 0, 0, -1])


@pytest.mark.parametrize("n", range(2, 10))
def test_zeta_is_future_causal(n):
    rep = build_clifford(n)
    rng = np.random.default_rng(10 + n)
    z = zeta_of_a(rep, random_spinors(rep, 10_000, rng))
    spatial = np.linalg.norm(z[:, :-1], axis=1)
    assert np.all(spatial <= z[:, -1] * (1 + 1e-12))
    if n in (3, 5):
        # Hopf maps: every zeta_a is null
        np.testing.assert_allclose(spatial, z[:, -1], rtol=1e-12)


def test_zeta_not_always_null_for_n7():
    # observed property: from n = 7 on, generic spinors give timelike zeta_a
    rep = build_clifford(7)
    z = zeta_of_a(rep, random_spinors(rep, 100, np.random.default_rng(0)))
    assert np.any(lorentz_dot(z, z) < -1e-3 * z[:, -1] ** 2)


def test_killing_spinor_simple_values():
    rep = build_clifford(4)
    a = np.arange(4) + 1j
    np.testing.assert_allclose(killing_spinor(rep, a, np.zeros(4)), np.sqrt(2) * a)
    x = np.array([0.1, -0.2, 0.3, 0.05])
    b = np.ones(4) * (0.5 - 0.5j)
    np.testing.assert_allclose(
        killing_spinor(rep, 2 * a - 3j * b, x),
        2 * killing_spinor(rep, a, x) - 3j * killing_spinor(rep, b, x),
    )


def test_killing_spinor_norm_formula():
    rep = build_clifford(3)
    rng = np.random.default_rng(3)
    a = random_spinors(rep, 1, rng)[0]
    x = np.array([0.2, 0.4, -0.1])
    phi = killing_spinor(rep, a, x)
    s = x @ x
    expected = 2 * (
        (1 + s) * np.vdot(a, a).real - 2 * np.real(np.sum((1j * rep.c(x) @ a) * np.conj(a)))
    ) / (1 - s)
    assert np.vdot(phi, phi).real == pytest.approx(expected, rel=1e-14)


def _conformal_killing_residual(rep, a, x, h=1e-6):
    """Killing equation checked through the spin connection of sigma^2 delta."""
    n = rep.n
    s = x @ x
    grad_f = 2 * x / (1 - s)
    sigma = 2 / (1 - s)
    phi = killing_spinor(rep, a, x)
    worst = 0.0
    for j in range(n):
        e = np.zeros(n)
        e[j] = h
        dphi = (killing_spinor(rep, a, x + e) - killing_spinor(rep, a, x - e)) / (2 * h)
        cj = rep.matrices[j]
        nabla = (dphi - 0.5 * cj @ rep.c(grad_f) @ phi - 0.5 * grad_f[j] * phi) / sigma
        worst = max(worst, np.abs(nabla + 0.5j * cj @ phi).max())
    return worst / np.linalg.norm(phi)


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_ball_spinor_satisfies_killing_equation(n):
    rep = build_clifford(n)
    rng = np.random.default_rng(20 + n)
    for a, x in zip(random_spinors(rep, 5, rng), random_ball_points(n, 5, rng, rmax=0.6)):
        assert _conformal_killing_residual(rep, a, x) < 1e-8


def test_norm_identity_at_centre():
    rep = build_clifford(3)
    a = np.array([0.6, 0.8j])
    lhs, rhs = verify_norm_identity(rep, a, np.zeros(3), 1.0)
    assert lhs == pytest.approx(2.0)
    assert rhs == pytest.approx(2.0)


@pytest.mark.parametrize("n", range(2, 9))
def test_norm_identity_random(n):
    rep = build_clifford(n)
    rng = np.random.default_rng(30 + n)
    for k in (0.5, 1.0, 2.0):
        A = random_spinors(rep, 100, rng)
        X = random_ball_points(n, 100, rng)
        for a, x in zip(A, X):
            lhs, rhs = verify_norm_identity(rep, a, x, k)
            assert abs(lhs - rhs) < 1e-11 * lhs
            assert rhs > 0  # so X . zeta_a < 0


@pytest.mark.parametrize("n", [3, 4, 5])
def test_dirac_identity_frame_independent(n):
    rep = build_clifford(n)
    rng = np.random.default_rng(40 + n)
    k, r = 1.0, 1.0
    s = np.tanh(k * r / 2)
    for _ in range(50):
        a = random_spinors(rep, 1, rng)[0]
        v = rng.standard_normal(n)
        x = s * v / np.linalg.norm(v)
        d1 = dirac_identity_check(rep, r, a, x, k)
        d2 = dirac_identity_check(rep, r, a, x, k, rng=rng)
        assert d1["dirac"] < 1e-12 * d1["phi_norm"]
        assert d2["dirac"] < 1e-12 * d2["phi_norm"]
        # a Killing spinor is annihilated by the Killing boundary operator
        assert d1["boundary_norm"] < 1e-12 * d1["phi_norm"]
        assert d1["boundary"] < 1e-12 * d1["phi_norm"]
