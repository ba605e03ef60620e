"""Hyperbolic space H^n(-k^2) as the upper hyperboloid in Minkowski space.

Vectors are numpy arrays whose last axis holds ``(x_1, ..., x_n, t)``; the
metric is ``sum x_i^2 - t^2``.  Leading axes broadcast, so every function
here works on single vectors and on node arrays alike.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

HYPERBOLOID_RTOL = 1e-12
FLOW_PRECOND_TOL = 1e-10
ARCCOSH_CLAMP = 1e-9


def lorentz_dot(u, v):
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape[-1] != v.shape[-1]:
        raise ValueError(f"dimension mismatch: {u.shape[-1]} vs {v.shape[-1]}")
    return np.sum(u[..., :-1] * v[..., :-1], axis=-1) - u[..., -1] * v[..., -1]


def lorentz_norm_sq(u):
    return lorentz_dot(u, u)


def basis(n: int, j: int) -> np.ndarray:
    """Unit vector e_j of R^{n,1}; ``j = 0`` is the time direction."""
    e = np.zeros(n + 1)
    e[-1 if j == 0 else j - 1] = 1.0
    return e


def origin(n: int, k: float) -> np.ndarray:
    o = np.zeros(n + 1)
    o[-1] = 1.0 / k
    return o


@dataclass(frozen=True)
class HyperboloidPoint:
    """Point(s) of H^n(-k^2).  ``coords`` may carry leading batch axes."""

    coords: np.ndarray
    k: float

    def __post_init__(self):
        coords = np.asarray(self.coords, dtype=float)
        object.__setattr__(self, "coords", coords)
        if self.k <= 0:
            raise ValueError("curvature scale k must be positive")
        if coords.shape[-1] < 3:
            raise ValueError("need n >= 2")
        if not np.all(np.isfinite(coords)):
            raise ValueError("non-finite coordinates")
        target = -1.0 / self.k**2
        err = np.abs(lorentz_norm_sq(coords) - target)
        # relative to the scale of the entries as well, so far-out points survive round-off
        scale = np.maximum(1.0 / self.k**2, coords[..., -1] ** 2)
        if np.any(err > 10 * HYPERBOLOID_RTOL * scale) or np.any(coords[..., -1] <= 0):
            raise ValueError("point is not on the upper hyperboloid")

    @property
    def n(self) -> int:
        return self.coords.shape[-1] - 1


def _check_same_k(p: HyperboloidPoint, q: HyperboloidPoint):
    if p.k != q.k:
        raise ValueError(f"curvature mismatch: k={p.k} vs k={q.k}")


def from_polar(r, Y, k: float) -> HyperboloidPoint:
    """``X = (sinh(kr) Y, cosh(kr)) / k`` with r the distance from o."""
    r = np.asarray(r, dtype=float)
    Y = np.asarray(Y, dtype=float)
    if np.any(np.abs(np.linalg.norm(Y, axis=-1) - 1.0) > 1e-12):
        raise ValueError("Y must be a unit vector")
    if np.any(r < 0):
        raise ValueError("r must be nonnegative")
    kr = k * r[..., None]
    X = np.concatenate([np.sinh(kr) * Y, np.cosh(kr)], axis=-1) / k
    return HyperboloidPoint(X, k)


def to_polar(p: HyperboloidPoint):
    """Inverse of :func:`from_polar`.  At o the direction is returned as e_1."""
    X = p.coords
    kt = np.maximum(p.k * X[..., -1], 1.0)
    r = np.arccosh(kt) / p.k
    x = X[..., :-1]
    norm = np.linalg.norm(x, axis=-1, keepdims=True)
    e1 = np.zeros_like(x)
    e1[..., 0] = 1.0
    Y = np.where(norm > 0, x / np.where(norm > 0, norm, 1.0), e1)
    return r, Y


def ball_to_hyperboloid(x, k: float) -> HyperboloidPoint:
    x = np.asarray(x, dtype=float)
    s = np.sum(x * x, axis=-1, keepdims=True)
    if np.any(s >= 1.0):
        raise ValueError("ball point must satisfy |x| < 1")
    X = np.concatenate([2 * x, 1 + s], axis=-1) / (1 - s)
    return HyperboloidPoint(X / k, k)


def hyperboloid_to_ball(p: HyperboloidPoint) -> np.ndarray:
    X = p.coords * p.k
    return X[..., :-1] / (1 + X[..., -1:])


def _clamped_arccosh(c):
    c = np.asarray(c, dtype=float)
    if np.any(c < 1 - ARCCOSH_CLAMP):
        raise ValueError(f"arccosh argument {np.min(c)} below 1")
    return np.arccosh(np.maximum(c, 1.0))


def geodesic_distance(p: HyperboloidPoint, q: HyperboloidPoint):
    """``cosh(k d) = -k^2 <X1, X2>``, evaluated through the chord for accuracy at short range.

    ``<X1 - X2, X1 - X2> = 4 sinh^2(k d / 2) / k^2``; the arccosh form loses
    everything below about 1e-8 / k.
    """
    _check_same_k(p, q)
    k = p.k
    c = -k * k * lorentz_dot(p.coords, q.coords)
    _clamped_arccosh(c)  # validates
    diff = p.coords - q.coords
    chord = np.sqrt(np.maximum(lorentz_dot(diff, diff), 0.0))
    short = 2.0 * np.arcsinh(k * chord / 2.0) / k
    return np.where(c > 2.0, np.arccosh(np.maximum(c, 1.0)) / k, short)[()]


def flow_arrays(X0, N0, rho, k: float):
    """Normal exponential map on raw arrays: returns ``(X_rho, dX/drho)``."""
    c = np.cosh(k * rho)
    s = np.sinh(k * rho)
    X = c * X0 + (s / k) * N0
    N = (k * s) * X0 + c * N0
    return X, N


def normal_flow(p: HyperboloidPoint, N0, rho: float):
    """Follow the geodesics leaving ``p`` with unit normal ``N0`` for distance rho."""
    N0 = np.asarray(N0, dtype=float)
    if N0.shape != p.coords.shape:
        raise ValueError("normal and point shapes differ")
    scale = np.maximum(1.0, np.abs(N0).max(axis=-1))
    if np.any(np.abs(lorentz_norm_sq(N0) - 1.0) > FLOW_PRECOND_TOL * scale**2):
        raise ValueError("normal is not a unit spacelike vector")
    if np.any(np.abs(lorentz_dot(p.coords, N0)) > FLOW_PRECOND_TOL * scale * np.abs(p.coords).max(axis=-1)):
        raise ValueError("normal is not orthogonal to the position vector")
    X, N = flow_arrays(p.coords, N0, rho, p.k)
    return HyperboloidPoint(X, p.k), N


def radial_direction(X, k: float):
    """Unit vector d/dr at X (outward from o); undefined at o itself."""
    kt = np.maximum(k * X[..., -1], 1.0)
    kr = np.arccosh(kt)
    x = X[..., :-1]
    Y = x / np.linalg.norm(x, axis=-1, keepdims=True)
    return np.concatenate([np.cosh(kr)[..., None] * Y, np.sinh(kr)[..., None]], axis=-1)
