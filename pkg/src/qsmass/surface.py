"""Star-shaped hypersurfaces in H^n and their equidistant foliation."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Callable, Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from scipy.interpolate import CubicSpline, RectBivariateSpline

from .grids import AxisymmetricGrid, LatLongGrid, principal_from_matrix
from .hyperbolic import flow_arrays, lorentz_dot


class GeometryError(ValueError):
    pass


# -- specification ----------------------------------------------------------


class ProfileSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    type: Literal["sphere", "perturbed_sphere", "ellipsoidal", "offcenter_sphere", "table"]
    r0: Optional[float] = Field(None, gt=0)
    eps: float = 0.0
    axis: list[float] = [1.0, 0.0, 0.0]
    coeffs: list[float] = [0.0, 0.0, 0.0]
    radius: Optional[float] = Field(None, gt=0)
    offset: float = 0.0
    theta: Optional[list[float]] = None
    phi: Optional[list[float]] = None
    values: Optional[list] = None

    @model_validator(mode="after")
    def _check(self):
        if self.type in ("sphere", "perturbed_sphere", "ellipsoidal") and self.r0 is None:
            raise ValueError(f"profile {self.type} needs r0")
        if self.type == "offcenter_sphere":
            if self.radius is None:
                raise ValueError("offcenter_sphere needs radius")
            if not 0 <= self.offset < self.radius:
                raise ValueError("offcenter_sphere needs 0 <= offset < radius (o inside)")
        if self.type == "table" and (self.theta is None or self.values is None):
            raise ValueError("table profile needs theta and values")
        if len(self.axis) != 3 or np.linalg.norm(self.axis) == 0:
            raise ValueError("axis must be a nonzero 3-vector")
        if len(self.coeffs) != 3:
            raise ValueError("coeffs must have 3 entries")
        return self


class GridSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    n_theta: int = Field(256, ge=4)
    n_phi: int = Field(128, ge=8)
    polar_filter: bool = True


class SurfaceSpec(BaseModel):
    model_config = ConfigDict(extra="forbid", arbitrary_types_allowed=True)

    n: int = Field(ge=3)
    k: float = Field(1.0, gt=0)
    mode: Literal["axisymmetric", "full2sphere"] = "axisymmetric"
    profile: Union[ProfileSpec, Callable]
    grid: GridSpec = GridSpec()
    convexity: Literal["warn", "error", "ignore"] = "warn"

    @model_validator(mode="after")
    def _check(self):
        if self.mode == "full2sphere" and self.n != 3:
            raise ValueError("full2sphere mode requires n = 3")
        p = self.profile
        if isinstance(p, ProfileSpec) and self.mode == "axisymmetric":
            if p.type == "perturbed_sphere" and not np.allclose(_unit(p.axis), [1, 0, 0]):
                raise ValueError("axisymmetric mode needs the perturbation axis along e1")
            if p.type == "ellipsoidal" and p.coeffs[1] != p.coeffs[2]:
                raise ValueError("axisymmetric mode needs coeffs[1] == coeffs[2]")
        if self.mode == "full2sphere" and self.grid.n_phi % 4:
            raise ValueError("n_phi must be a multiple of 4")
        return self

    @field_validator("profile", mode="before")
    @classmethod
    def _profile(cls, v):
        if isinstance(v, dict):
            return ProfileSpec(**v)
        return v


def _unit(v):
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v)


def profile_function(p: ProfileSpec, k: float) -> Callable:
    """r(theta, phi) with direction (cos th, sin th cos ph, sin th sin ph)."""

    def direction(th, ph):
        return np.stack([np.cos(th), np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph)], axis=-1)

    if p.type == "sphere":
        return lambda th, ph: np.full(np.shape(th), p.r0)
    if p.type == "perturbed_sphere":
        ax = _unit(p.axis)
        return lambda th, ph: p.r0 * (1 + p.eps * (direction(th, ph) @ ax) ** 2)
    if p.type == "ellipsoidal":
        c = np.asarray(p.coeffs)
        return lambda th, ph: p.r0 * (1 + (direction(th, ph) ** 2) @ c)
    if p.type == "offcenter_sphere":
        ks, kR = k * p.offset, k * p.radius

        def r(th, ph):
            C = math.cosh(ks)
            S = math.sinh(ks) * np.cos(th)
            return (np.arctanh(S / C) + np.arccosh(math.cosh(kR) / np.sqrt(C * C - S * S))) / k

        return r
    return _table_function(p)


def _table_function(p: ProfileSpec):
    th = np.asarray(p.theta, dtype=float)
    vals = np.asarray(p.values, dtype=float)
    if np.any(~np.isfinite(vals)) or np.any(vals <= 0):
        raise GeometryError("tabulated radii must be finite and positive")
    if p.phi is None:
        if vals.shape != th.shape:
            raise ValueError("table values must match theta")
        # even reflection about both poles keeps the interpolant smooth there
        spline = CubicSpline(th, vals, bc_type="clamped")
        return lambda t, ph: spline(t)
    phi = np.asarray(p.phi, dtype=float)
    if vals.shape != (th.size, phi.size):
        raise ValueError("table values must have shape (len(theta), len(phi))")
    # pad periodically in phi and by pole reflection (theta -> -theta, phi + pi) in theta
    period = 2 * math.pi
    phi_pad = np.concatenate([phi[-3:] - period, phi, phi[:3] + period])
    v_pad = np.concatenate([vals[:, -3:], vals, vals[:, :3]], axis=1)
    shift = lambda row: np.interp((phi_pad + math.pi) % period, np.append(phi, phi[0] + period),
                                  np.append(row, row[0]))  # noqa: E731
    top = np.stack([shift(v_pad_row) for v_pad_row in vals[1:4][::-1]])
    bot = np.stack([shift(v_pad_row) for v_pad_row in vals[-4:-1][::-1]])
    th_pad = np.concatenate([-th[1:4][::-1], th, 2 * math.pi - th[-4:-1][::-1]])
    spline = RectBivariateSpline(th_pad, phi_pad, np.concatenate([top, v_pad, bot]))
    return lambda t, ph: spline.ev(t, np.mod(ph, period))


def make_grid(spec: SurfaceSpec):
    if spec.mode == "axisymmetric":
        return AxisymmetricGrid(spec.n, spec.grid.n_theta)
    return LatLongGrid(spec.grid.n_theta, spec.grid.n_phi, spec.grid.polar_filter)


def spec_from_json(doc: dict) -> SurfaceSpec:
    return SurfaceSpec(**doc)


# -- leaves -------------------------------------------------------------------


@dataclass(frozen=True)
class BaseData:
    """Data on the initial surface from which every leaf is computed in closed form."""

    Xf: np.ndarray
    Nf: np.ndarray
    lam: np.ndarray
    A: np.ndarray
    w: np.ndarray


@dataclass(frozen=True)
class SurfaceLeaf:
    grid: object
    k: float
    rho: float
    base: BaseData
    Xf: np.ndarray  # fine-grid embedding (reduced coordinates in axisymmetric mode)
    Nf: np.ndarray
    lam: np.ndarray  # principal curvatures per node
    A: np.ndarray  # shape operator per node in chart coordinates
    w: np.ndarray  # area weights
    flags: tuple = field(default_factory=tuple)

    @property
    def n(self) -> int:
        return self.grid.n

    @property
    def X(self):
        return self.grid.centers(self.Xf)

    @property
    def N(self):
        return self.grid.centers(self.Nf)

    @cached_property
    def H0(self):
        return np.trace(self.A, axis1=-2, axis2=-1)

    @cached_property
    def A_norm_sq(self):
        return np.einsum("...ab,...ba->...", self.A, self.A)

    @property
    def r(self):
        x = self.X[..., :-1]
        return np.arcsinh(self.k * np.linalg.norm(x, axis=-1)) / self.k

    @property
    def Y(self):
        x = self.X[..., :-1]
        return x / np.linalg.norm(x, axis=-1, keepdims=True)

    @property
    def g(self):
        return self.grid.metric_centers(self.Xf)

    @property
    def area(self) -> float:
        return float(self.w.sum())

    @cached_property
    def _operator(self):
        return self.grid.operator(self.Xf, self.w)

    def laplacian(self):
        return self._operator


def _embed(grid, r, k):
    Yf = grid.fine_directions()
    kr = k * r
    return np.concatenate([np.sinh(kr)[..., None] * Yf, np.cosh(kr)[..., None]], axis=-1) / k


def build_leaf(spec: SurfaceSpec) -> SurfaceLeaf:
    grid = make_grid(spec)
    k = spec.k
    fn = spec.profile if callable(spec.profile) else profile_function(spec.profile, k)
    th, ph = grid.profile_angles()
    r = np.asarray(fn(th, ph), dtype=float)
    if r.shape != th.shape:
        r = np.broadcast_to(r, th.shape).copy()
    if not np.all(np.isfinite(r)):
        raise GeometryError("profile produced non-finite radii")
    if np.any(r <= 0):
        raise GeometryError("profile must be positive")
    Xf = _embed(grid, r, k)
    Nf = grid.normals(Xf, k)
    g = grid.metric_centers(Xf)
    cond = np.linalg.cond(g)
    if not np.all(np.isfinite(cond)) or cond.max() > 1e8:
        raise GeometryError(f"degenerate induced metric (condition number {cond.max():.3g})")
    lam, A = grid.shape_fd(Xf, Nf)
    w = grid.area_weights(Xf)
    flags = []
    H0 = np.trace(A, axis1=-2, axis2=-1)
    if np.any(H0 <= 0):
        flags.append("nonpositive_H0")
    if np.any(lam <= 0):
        flags.append("nonconvex")
    if flags:
        msg = f"initial surface flagged: {', '.join(flags)}"
        if spec.convexity == "error":
            raise GeometryError(msg)
        if spec.convexity == "warn":
            warnings.warn(msg, stacklevel=2)
    base = BaseData(Xf, Nf, lam, A, w)
    return SurfaceLeaf(grid, k, 0.0, base, Xf, Nf, lam, A, w, tuple(flags))


def leaf_at(leaf: SurfaceLeaf, rho: float) -> SurfaceLeaf:
    """The leaf at absolute parameter rho of the foliation containing ``leaf``."""
    if rho < 0:
        raise ValueError("rho must be nonnegative")
    k, b = leaf.k, leaf.base
    Xf, Nf = flow_arrays(b.Xf, b.Nf, rho, k)
    c, s = math.cosh(k * rho), math.sinh(k * rho)
    lam = (k * s + c * b.lam) / (c + s * b.lam / k)
    eye = np.eye(b.A.shape[-1])
    M = c * eye + (s / k) * b.A
    P = k * s * eye + c * b.A
    A = P @ np.linalg.inv(M)
    w = b.w * np.linalg.det(M)
    return replace(leaf, rho=float(rho), Xf=Xf, Nf=Nf, lam=lam, A=A, w=w)


def advance_leaf(leaf: SurfaceLeaf, drho: float) -> SurfaceLeaf:
    if drho < 0:
        raise ValueError("advance_leaf needs drho >= 0")
    return leaf_at(leaf, leaf.rho + drho)


def laplace_beltrami(leaf: SurfaceLeaf, f):
    return leaf.laplacian()(np.asarray(f, dtype=float))


def scalar_curvature_extrinsic(leaf: SurfaceLeaf):
    n, k = leaf.n, leaf.k
    return -(n - 1) * (n - 2) * k * k + leaf.H0**2 - leaf.A_norm_sq


def recomputed_shape(leaf: SurfaceLeaf):
    """Principal curvatures and shape operator re-derived from the embedding of this leaf."""
    return leaf.grid.shape_fd(leaf.Xf, leaf.Nf)


def vector_laplacian(leaf: SurfaceLeaf, V):
    """Laplacian of each Minkowski coordinate of a vector field given in grid coordinates."""
    op = leaf.laplacian()
    out = op.apply_vector(V)
    if isinstance(leaf.grid, AxisymmetricGrid):
        # the b-slot stands for b z with z on S^{n-2}; its Laplacian picks up b Δz / ell^2,
        # averaged over the cell like the flux part
        q = leaf.grid.inverse_factor / leaf.X[..., 1] ** 2
        out[..., 1] -= (leaf.n - 2) * q * V[..., 1]
    return out


def _residual_norms(leaf, R):
    e = np.linalg.norm(R, axis=-1)
    lor = np.sqrt(np.abs(lorentz_dot(R, R)))
    w = leaf.w
    return {
        "euclidean": e,
        "lorentz": lor,
        "l2": float(np.sqrt(np.sum(w * e * e) / np.sum(w))),
        "max": float(e.max()),
    }


def verify_position_laplacian(leaf: SurfaceLeaf) -> dict:
    """Residual of H0 dX/drho + Δ X - (n-1) k^2 X (dX/drho = N)."""
    n, k = leaf.n, leaf.k
    X = leaf.X
    R = leaf.H0[..., None] * leaf.N + vector_laplacian(leaf, X) - (n - 1) * k * k * X
    return _residual_norms(leaf, R)


def verify_w_laplacian(leaf: SurfaceLeaf, alpha: float) -> dict:
    """Same identity for W = (x, alpha t), whose rho-derivative is (N_x, alpha N_t)."""
    n, k = leaf.n, leaf.k
    scale = np.ones(leaf.X.shape[-1])
    scale[-1] = alpha
    W = leaf.X * scale
    dW = leaf.N * scale
    R = leaf.H0[..., None] * dW + vector_laplacian(leaf, W) - (n - 1) * k * k * W
    return _residual_norms(leaf, R)


def intrinsic_scalar_curvature(leaf: SurfaceLeaf):
    """Scalar curvature of the induced metric alone, ignoring the shape operator."""
    grid = leaf.grid
    Xf = leaf.Xf
    if isinstance(grid, AxisymmetricGrid):
        E, _ = grid.metric(Xf)
        h = grid.dtheta / 2
        ellp = grid.pad(Xf)[..., 1]  # signed, so it is odd across each pole
        ell_s = Xf[..., 1]
        d_ell = (ellp[2:] - ellp[:-2]) / (2 * h)
        sqE = np.sqrt(E)
        ell_prime = d_ell / sqE
        pad = np.concatenate([[ell_prime[1]], ell_prime, [ell_prime[-2]]])
        ell_pp = (pad[2:] - pad[:-2]) / (2 * h) / sqE
        m = grid.n - 2
        ell_s, ell_pp, ell_prime = (grid.centers(a) for a in (ell_s, ell_pp, ell_prime))
        return -2 * m * ell_pp / ell_s + m * (m - 1) * (1 - ell_prime**2) / ell_s**2
    return 2 * _brioschi(grid, Xf)


def _brioschi(grid: LatLongGrid, Xf):
    """Gauss curvature of the induced metric at cell centres.

    G and F vanish like sin^2 and sin at the poles, so the smooth quotients
    g = G / sin^2 and f = F / sin are differenced and the sin factors are
    applied analytically; differencing G itself loses all accuracy in the
    first rows.
    """
    E, F, G = grid.metric(Xf)
    rows = slice(1, None, 2)
    E, F, G = E[rows], F[rows], G[rows]
    th = grid.theta[:, None]
    s, c = np.sin(th), np.cos(th)
    f, g = F / s, G / s**2
    ht, hp = grid.dtheta, grid.dphi / 2
    half = grid.n_phi

    def pad(A):
        return np.concatenate([np.roll(A[:1], -half, axis=1), A, np.roll(A[-1:], -half, axis=1)])

    def du(A):
        P = pad(A)
        return (P[2:] - P[:-2]) / (2 * ht)

    def duu(A):
        P = pad(A)
        return (P[2:] - 2 * A + P[:-2]) / ht**2

    def dv(A):
        return (np.roll(A, -1, axis=1) - np.roll(A, 1, axis=1)) / (2 * hp)

    def dvv(A):
        return (np.roll(A, -1, axis=1) - 2 * A + np.roll(A, 1, axis=1)) / hp**2

    Eu, Ev, Evv = du(E), dv(E), dvv(E)
    Fu = c * f + s * du(f)
    Fv = s * dv(f)
    Fuv = c * dv(f) + s * dv(du(f))
    Gu = 2 * s * c * g + s**2 * du(g)
    Gv = s**2 * dv(g)
    Guu = 2 * (c * c - s * s) * g + 4 * s * c * du(g) + s**2 * duu(g)
    M1 = np.stack(
        [
            np.stack([-0.5 * Evv + Fuv - 0.5 * Guu, 0.5 * Eu, Fu - 0.5 * Ev], -1),
            np.stack([Fv - 0.5 * Gu, E, F], -1),
            np.stack([0.5 * Gv, F, G], -1),
        ],
        -2,
    )
    Z = np.zeros_like(E)
    M2 = np.stack(
        [
            np.stack([Z, 0.5 * Ev, 0.5 * Gu], -1),
            np.stack([0.5 * Ev, E, F], -1),
            np.stack([0.5 * Gu, F, G], -1),
        ],
        -2,
    )
    K = (np.linalg.det(M1) - np.linalg.det(M2)) / (E * G - F * F) ** 2
    return K[:, 0::2]


__all__ = [
    "GeometryError",
    "GridSpec",
    "ProfileSpec",
    "SurfaceLeaf",
    "SurfaceSpec",
    "advance_leaf",
    "build_leaf",
    "intrinsic_scalar_curvature",
    "laplace_beltrami",
    "leaf_at",
    "principal_from_matrix",
    "profile_function",
    "recomputed_shape",
    "scalar_curvature_extrinsic",
    "spec_from_json",
    "verify_position_laplacian",
    "verify_w_laplacian",
]
