"""Clifford matrices, Killing spinors on the ball model, and null vectors.

Conventions: Clifford matrices satisfy ``c_i c_j + c_j c_i = -2 delta_ij I``,
so ``sqrt(-1) c_j`` is Hermitian; ``<u, v> = sum u_i conj(v_i)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .hyperbolic import ball_to_hyperboloid, lorentz_dot

G1 = np.array([[1j, 0], [0, -1j]])
G2 = np.array([[0, 1j], [1j, 0]])
T = np.array([[0, -1j], [1j, 0]])
I2 = np.eye(2, dtype=complex)


@dataclass(frozen=True)
class CliffordRep:
    n: int
    matrices: tuple  # c(e_1) ... c(e_n)

    @property
    def dim(self) -> int:
        return 2 ** (self.n // 2)

    def c(self, v) -> np.ndarray:
        """Clifford action of a spatial vector (or stack of them)."""
        v = np.asarray(v, dtype=float)
        return np.tensordot(v, np.stack(self.matrices), axes=([-1], [0]))

    @property
    def c0(self) -> np.ndarray:
        return 1j * np.eye(self.dim)


@lru_cache(maxsize=None)
def _matrices(n: int) -> tuple:
    if n == 2:
        return (G1, G2)
    if n == 3:
        return (G1, G2, 1j * T)
    prev = _matrices(n - 2)
    if n % 2 == 0:
        eye = np.eye(prev[0].shape[0])
        return (np.kron(eye, G1), np.kron(eye, G2)) + tuple(np.kron(c, T) for c in prev)
    # odd: n = 2m+1 from the 2m-1 matrices
    last = prev[-1]
    head = tuple(np.kron(I2, c) for c in prev[:-1])
    return head + (np.kron(-1j * G1, last), np.kron(-1j * G2, last), np.kron(T, last))


def build_clifford(n: int) -> CliffordRep:
    if n < 2:
        raise ValueError("Clifford representation needs n >= 2")
    return CliffordRep(n, _matrices(n))


def anticommutation_residual(rep: CliffordRep) -> float:
    eye = np.eye(rep.dim)
    worst = 0.0
    for i, ci in enumerate(rep.matrices):
        for j, cj in enumerate(rep.matrices):
            target = -2.0 * eye if i == j else 0.0 * eye
            worst = max(worst, np.abs(ci @ cj + cj @ ci - target).max())
    return worst


def selfadjoint_residual(rep: CliffordRep) -> float:
    return max(np.abs(1j * c - (1j * c).conj().T).max() for c in rep.matrices)


def _herm(u, v):
    return np.sum(u * np.conj(v), axis=-1)


def zeta_of_a(rep: CliffordRep, a) -> np.ndarray:
    """Minkowski vector ``(<i c_j a, a>)_j`` with time component ``|a|^2``."""
    a = np.asarray(a, dtype=complex)
    spatial = [np.real(_herm(a @ (1j * c).T, a)) for c in rep.matrices]
    return np.stack(spatial + [np.real(_herm(a, a))], axis=-1)


def _hopf_inverse(z) -> np.ndarray:
    """Unit a in C^2 with (<i g1 a,a>, <i g2 a,a>, <-T a,a>) = z for z on S^2."""
    z1, z2, z3 = z
    # the map is (|a2|^2-|a1|^2, -2 Re(a1 conj a2), 2 Im(a1 conj a2))
    w = complex(-z2, z3) / 2.0  # a1 * conj(a2)
    if z1 >= 0:
        a2 = np.sqrt((1 + z1) / 2)
        a1 = w / a2
    else:
        a1 = np.sqrt((1 - z1) / 2)
        a2 = np.conj(w) / a1
    return np.array([a1, a2], dtype=complex)


def _split(v, norm_tol=1e-300):
    s = np.linalg.norm(v)
    if s <= norm_tol:
        u = np.zeros_like(v)
        u[0] = 1.0
        return 0.0, u
    return s, v / s


def _a_for_direction(n: int, X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    X = X / np.linalg.norm(X)
    if n == 2:
        theta = np.arctan2(X[1], X[0])
        return np.array([-np.sin(theta / 2), np.cos(theta / 2)], dtype=complex)
    if n == 3:
        return _hopf_inverse(X)
    if n % 2 == 1:
        # X = (y_1..y_{2m-2}, y_{2m-1} z) with z on S^2
        s, z = _split(X[-3:])
        y = np.append(X[:-3], s)
        b = _a_for_direction(n - 2, y)
        a = _hopf_inverse(-z)
        return np.kron(a, b)
    # even: X = (z1, z2, z3 y) with y on S^{n-3}
    s, y = _split(X[2:])
    b = _hopf_inverse(np.array([X[0], X[1], -s]))
    a = _a_for_direction(n - 2, y)
    return np.kron(a, b)


def a_of_null(rep: CliffordRep, zeta, tol: float = 1e-10) -> np.ndarray:
    """A unit spinor a with zeta_a equal to the t-normalized future null vector."""
    zeta = np.asarray(zeta, dtype=float)
    if zeta.shape != (rep.n + 1,):
        raise ValueError("zeta has the wrong dimension")
    if zeta[-1] <= 0:
        raise ValueError("zeta must be future directed")
    zeta = zeta / zeta[-1]
    if abs(lorentz_dot(zeta, zeta)) > tol:
        raise ValueError("zeta is not null")
    return _a_for_direction(rep.n, zeta[:-1])


def killing_spinor(rep: CliffordRep, a, x) -> np.ndarray:
    """Ball-model Killing spinor ``sqrt(2/(1-|x|^2)) (a - i c(x) a)``.

    ``x`` lives in the unit ball; for curvature -k^2 the ball is the
    rescaled model, so the formula is the same for every k.
    """
    a = np.asarray(a, dtype=complex)
    x = np.asarray(x, dtype=float)
    s = np.sum(x * x, axis=-1)
    if np.any(s >= 1):
        raise ValueError("ball point must satisfy |x| < 1")
    cx = rep.c(x)
    phi = a - 1j * np.einsum("...ij,j->...i", cx, a)
    return np.sqrt(2.0 / (1.0 - s))[..., None] * phi


def verify_norm_identity(rep: CliffordRep, a, x, k: float):
    """Return ``(|phi|^2, -2k X.zeta_a)`` so callers can form any residual."""
    phi = killing_spinor(rep, a, x)
    lhs = np.real(_herm(phi, phi))
    X = ball_to_hyperboloid(x, k).coords
    rhs = -2.0 * k * lorentz_dot(X, zeta_of_a(rep, a))
    return lhs, rhs


def _tangent_frame(e_n, rng=None):
    """Orthonormal completion of the unit vector e_n; optionally randomly rotated."""
    n = e_n.shape[0]
    M = np.eye(n)
    if rng is not None:
        M = rng.standard_normal((n, n))
    M = np.column_stack([e_n, M])
    Q, _ = np.linalg.qr(M)
    frame = Q[:, 1:n]
    return frame.T


def hypersurface_dirac(rep: CliffordRep, phi, frame, e_n, h, k: float) -> np.ndarray:
    """D^S phi for a Killing spinor, assembled from the local formula.

    The spin derivative along each tangent e_a is substituted from the
    Killing equation, ``nabla_a phi = -(i/2) k c(e_a) phi``.
    """
    cn = rep.c(e_n)
    out = np.zeros_like(phi)
    cas = [rep.c(e) for e in frame]
    for a_idx, ca in enumerate(cas):
        nabla = -0.5j * k * ca @ phi
        for b_idx, cb in enumerate(cas):
            if h[a_idx, b_idx] != 0.0:
                nabla = nabla + 0.5 * h[a_idx, b_idx] * cb @ cn @ phi
        out = out + ca @ cn @ nabla  # c_S(e_a) = c(e_a) c(e_n)
    return out


def killing_boundary_operator(rep: CliffordRep, phi, frame, e_n, k: float) -> np.ndarray:
    """``sum_a c(e_n) c(e_a) (nabla_a + (i/2) k c(e_a)) phi`` for a Killing spinor."""
    cn = rep.c(e_n)
    out = np.zeros_like(phi)
    for e in frame:
        ca = rep.c(e)
        nabla = -0.5j * k * ca @ phi
        out = out + cn @ ca @ (nabla + 0.5j * k * ca @ phi)
    return out


def dirac_identity_check(rep: CliffordRep, r: float, a, x, k: float, rng=None) -> dict:
    """Residuals of the D^S identity on the geodesic sphere of radius r through x.

    ``x`` is a ball point with hyperbolic distance r from the centre.  Returns
    the D^S residual, the boundary-operator consistency residual and |phi|.
    """
    x = np.asarray(x, dtype=float)
    n = rep.n
    e_n = x / np.linalg.norm(x)
    frame = _tangent_frame(e_n, rng)
    lam = k / np.tanh(k * r)
    h = lam * np.eye(n - 1)
    H0 = (n - 1) * lam
    phi = killing_spinor(rep, a, x)
    cn = rep.c(e_n)
    DS = hypersurface_dirac(rep, phi, frame, e_n, h, k)
    resid = DS + 0.5 * H0 * phi + 0.5j * (n - 1) * k * cn @ phi
    B = killing_boundary_operator(rep, phi, frame, e_n, k)
    B_from_DS = -DS - 0.5 * H0 * phi - 0.5j * k * (n - 1) * cn @ phi
    return {
        "dirac": float(np.linalg.norm(resid)),
        "boundary": float(np.linalg.norm(B - B_from_DS)),
        "boundary_norm": float(np.linalg.norm(B)),
        "phi_norm": float(np.linalg.norm(phi)),
    }


def random_null_directions(n: int, count: int, rng) -> np.ndarray:
    v = rng.standard_normal((count, n))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    return np.concatenate([v, np.ones((count, 1))], axis=1)


def random_ball_points(n: int, count: int, rng, rmax: float = 0.95) -> np.ndarray:
    v = rng.standard_normal((count, n))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    return v * (rmax * rng.random((count, 1)) ** (1.0 / n))


def random_spinors(rep: CliffordRep, count: int, rng) -> np.ndarray:
    return rng.standard_normal((count, rep.dim)) + 1j * rng.standard_normal((count, rep.dim))
