"""Quasi-local mass vector, its rho-derivative and the pointwise sign checks.

All integrals are node sums with the leaf's area weights.  In axisymmetric
mode vectors are integrated over the rotation orbits, which kills every
component transverse to the axis; pointwise quantities depending on the
transverse part of zeta are checked at the extremes of the orbit, which
suffices because they are affine (or, for |.|, convex) in it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import norm, qmc

from .hyperbolic import lorentz_dot


@dataclass(frozen=True)
class MassContext:
    R1: float
    R2: float
    alpha: float
    mu: float
    k: float

    def __post_init__(self):
        if not 0 < self.R1 <= self.R2:
            raise ValueError("need 0 < R1 <= R2")
        if self.mu < 0 or self.alpha <= 1:
            raise ValueError("alpha must exceed 1 and mu must be nonnegative")

    def as_dict(self) -> dict:
        return {"R1": self.R1, "R2": self.R2, "alpha": self.alpha, "mu": self.mu}


def alpha_mu(R1: float, R2: float, k: float):
    s1, s2 = math.sinh(k * R1), math.sinh(k * R2)
    mu = math.sqrt(max(s2 * s2 / (s1 * s1) - 1.0, 0.0)) / s1
    return 1.0 / math.tanh(k * R1) + mu, mu


def compute_context(leaf0) -> MassContext:
    """Inscribed and circumscribed radii about o, taken over the fine sampling."""
    x = leaf0.Xf[..., :-1]
    r = np.arcsinh(leaf0.k * np.linalg.norm(x, axis=-1)) / leaf0.k
    R1, R2 = float(r.min()), float(r.max())
    if R2 - R1 <= 1e-12 * R2:
        R2 = R1  # round-off only; mu would otherwise pick up sqrt(eps)
    alpha, mu = alpha_mu(R1, R2, leaf0.k)
    return MassContext(R1, R2, alpha, mu, leaf0.k)


def null_directions(n: int, count: int = 32) -> np.ndarray:
    """Future null vectors (zeta, 1) with zeta from a Halton sequence pushed onto S^{n-1}."""
    pts = qmc.Halton(d=n, scramble=False).random(count + 1)[1:]  # the first Halton point is 0
    v = norm.ppf(pts)
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    return np.concatenate([v, np.ones((count, 1))], axis=1)


def is_null_direction(zeta, tol: float = 1e-12) -> bool:
    zeta = np.asarray(zeta, dtype=float)
    return zeta[-1] > 0 and abs(lorentz_dot(zeta, zeta)) <= tol * zeta[-1] ** 2


def _W_scale(dim: int, alpha: float):
    s = np.ones(dim)
    s[-1] = alpha
    return s


def mass_vector(leaf, u, alpha: float = 1.0) -> np.ndarray:
    """Full (n+1)-vector sum of w (H0 - H) W with W = (x, alpha t) and H = H0 / u."""
    H0 = leaf.H0
    W = leaf.X * _W_scale(leaf.X.shape[-1], alpha)
    dens = leaf.w * (H0 - H0 / u)
    red = np.tensordot(dens, W, axes=(list(range(dens.ndim)), list(range(dens.ndim))))
    return leaf.grid.orbit_average_vector(red)


def mass_scale(leaf, u, alpha: float = 1.0) -> float:
    """Sum of w |H0 - H| (|x| + alpha t): bounds |m.zeta| for every normalized null zeta."""
    H0 = leaf.H0
    x = np.linalg.norm(leaf.X[..., :-1], axis=-1)
    return float(np.sum(leaf.w * np.abs(H0 - H0 / u) * (x + alpha * leaf.X[..., -1])))


def cosh_mass(leaf, u) -> float:
    H0 = leaf.H0
    return float(np.sum(leaf.w * (H0 - H0 / u) * leaf.k * leaf.X[..., -1]))


def cosh_mass_scale(leaf, u) -> float:
    H0 = leaf.H0
    return float(np.sum(leaf.w * np.abs(H0 - H0 / u) * leaf.k * leaf.X[..., -1]))


def mass_derivative_vector(leaf, u, alpha: float = 1.0) -> np.ndarray:
    """d/drho of :func:`mass_vector` along the flow, assuming the W identity holds exactly.

    Equals ``-sum w u^{-1} (u-1)^2 ((H0^2-|A|^2) W/2 + H0 dW/drho)``.
    """
    s = _W_scale(leaf.X.shape[-1], alpha)
    W, dW = leaf.X * s, leaf.N * s
    H0 = leaf.H0
    V = 0.5 * (H0 * H0 - leaf.A_norm_sq)[..., None] * W + H0[..., None] * dW
    dens = -leaf.w * (u - 1.0) ** 2 / u
    red = np.tensordot(dens, V, axes=(list(range(dens.ndim)), list(range(dens.ndim))))
    return leaf.grid.orbit_average_vector(red)


def mass_derivative_analytic(leaf, u, ctx: MassContext, zeta) -> float:
    return float(lorentz_dot(mass_derivative_vector(leaf, u, ctx.alpha), np.asarray(zeta, float)))


def _node_directions(leaf, zeta):
    """Reduced spatial parts of zeta to pair with node vectors: shape (m, d)."""
    zeta = np.asarray(zeta, dtype=float)
    grid = leaf.grid
    if grid.mode == "axisymmetric":
        return np.array([[zeta[0], c] for c in grid.orbit_samples(zeta)])
    return zeta[None, :-1]


def radial_kinematics(leaf):
    """(kr, Y, dr/drho, dY/drho) per node from the exact normal flow."""
    k = leaf.k
    x, N = leaf.X[..., :-1], leaf.N
    ax = np.linalg.norm(x, axis=-1)
    Y = x / ax[..., None]
    kr = np.arcsinh(k * ax)
    dr = N[..., -1] / np.sinh(kr)
    Nsp = N[..., :-1]
    dY = (Nsp - Y * np.sum(Y * Nsp, axis=-1, keepdims=True)) / ax[..., None]
    return kr, Y, dr, dY


def integrand_B(leaf, ctx: MassContext, zeta):
    """Pointwise B (nodes x orbit samples) and a per-entry magnitude scale."""
    k, alpha = leaf.k, ctx.alpha
    kr, Y, dr, dY = radial_kinematics(leaf)
    S, C = np.sinh(kr)[..., None], np.cosh(kr)[..., None]
    Z = _node_directions(leaf, zeta)
    phi = Y @ Z.T
    dphi = dY @ Z.T
    H0 = leaf.H0[..., None]
    Q = (leaf.H0**2 - leaf.A_norm_sq)[..., None]
    dr = dr[..., None]
    terms = [
        0.5 * Q * phi * S,
        -0.5 * Q * alpha * C,
        k * H0 * phi * C * dr,
        H0 * S * dphi,
        -k * H0 * alpha * S * dr,
    ]
    B = sum(terms)
    scale = sum(np.abs(t) for t in terms)
    return B, scale


def _slacks(kr, phi, dphi, dr, ctx: MassContext):
    k = ctx.k
    energy = (1 - phi**2) * k * k / np.sinh(kr) ** 2 * (1 - dr**2) - dphi**2
    radial = dr - math.sinh(k * ctx.R1) / math.sinh(k * ctx.R2)
    angular = ctx.mu * k * dr - np.abs(dphi)
    return {"angular_energy": energy, "radial_speed": radial, "angular_speed": angular}


def geodesic_slacks(leaf, ctx: MassContext, zeta) -> dict:
    """Slacks of the three geodesic inequalities using the exact normal velocity."""
    kr, Y, dr, dY = radial_kinematics(leaf)
    Z = _node_directions(leaf, zeta)
    return _slacks(kr[..., None], Y @ Z.T, dY @ Z.T, dr[..., None], ctx)


def check_geodesic_inequalities(leaf_a, leaf_b, ctx: MassContext, zeta) -> dict:
    """Slacks from finite differences between two nearby leaves of the same foliation."""
    d = leaf_b.rho - leaf_a.rho
    if d <= 0:
        raise ValueError("leaf_b must lie beyond leaf_a")
    Z = _node_directions(leaf_a, zeta)
    vals = []
    for leaf in (leaf_a, leaf_b):
        kr, Y, _, _ = radial_kinematics(leaf)
        vals.append((kr[..., None], Y @ Z.T))
    (kra, pa), (krb, pb) = vals
    dr = (krb - kra) / (ctx.k * d)
    dphi = (pb - pa) / d
    out = _slacks(0.5 * (kra + krb), 0.5 * (pa + pb), dphi, dr, ctx)
    out["min"] = {key: float(v.min()) for key, v in out.items()}
    return out


def limit_measure(leaf):
    """(gamma, dmu): limits of e^{-k rho} X and e^{-(n-1) k rho} dSigma_rho."""
    b, k = leaf.base, leaf.k
    X0, N0 = leaf.grid.centers(b.Xf), leaf.grid.centers(b.Nf)
    gamma = 0.5 * (X0 + N0 / k)  # cosh(k rho) e^{-k rho} -> 1/2
    eye = np.eye(b.A.shape[-1])
    dmu = b.w * np.linalg.det((eye + b.A / k) / 2.0)
    return gamma, dmu


def limit_mass_formula(leaf, v, zeta) -> float:
    """-2 (n-1) k^2 sum v (gamma . zeta) dmu."""
    n, k = leaf.n, leaf.k
    gamma, dmu = limit_measure(leaf)
    zred = leaf.grid.reduce_covector(zeta)
    return float(-2 * (n - 1) * k * k * np.sum(v * dmu * lorentz_dot(gamma, zred)))


def spinor_mass_pairing(mass_X, zeta, k: float) -> float:
    """The integral of (H0 - H)(-2k X . zeta) given the X-mass vector."""
    return float(-2 * k * lorentz_dot(mass_X, np.asarray(zeta, float)))


def classify_causal(m) -> str:
    m = np.asarray(m, dtype=float)
    size = float(np.linalg.norm(m))
    tol = 1e-8 * size
    if lorentz_dot(m, m) > tol * size:
        return "spacelike"
    return "future-nonspacelike" if m[-1] >= -tol else "past"
