"""The quasi-spherical flow for u along the equidistant foliation.

    du/drho = (u^2 / H0) Δ u + (u - u^3) (H0^2 - |A|^2 + 2 (n-1) k^2) / (2 H0)

integrated with Heun's method (explicit RK2).  Leaves are evaluated in
closed form from the initial surface, so the only time-discretization error
is in u itself.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from .mass import (
    MassContext,
    cosh_mass,
    cosh_mass_scale,
    limit_measure,
    mass_derivative_vector,
    mass_scale,
    mass_vector,
)
from .surface import SurfaceLeaf, leaf_at


class FlowError(RuntimeError):
    def __init__(self, message: str, rho: float, kind: str):
        super().__init__(f"{message} at rho={rho:.6g}")
        self.rho = rho
        self.kind = kind


@dataclass(frozen=True)
class FlowState:
    rho: float
    leaf: SurfaceLeaf
    u: np.ndarray

    def __post_init__(self):
        if self.u.shape != self.leaf.w.shape:
            raise ValueError("u must be defined on every node")
        if not np.all(self.u > 0):
            raise ValueError("u must be positive")


class FlowConfig(BaseModel):
    """Lengths default to multiples of 1/k when left unset."""

    model_config = ConfigDict(extra="forbid")

    rho_max: Optional[float] = Field(None, gt=0)
    safety: float = Field(0.5, gt=0, le=1)
    stride: Optional[float] = Field(None, gt=0)
    max_step: Optional[float] = Field(None, gt=0)
    u_bounds: tuple[float, float] = (1e-3, 1e3)

    def resolved(self, k: float) -> tuple[float, float, float]:
        return (
            self.rho_max if self.rho_max is not None else 6.0 / k,
            self.stride if self.stride is not None else 0.05 / k,
            self.max_step if self.max_step is not None else 0.005 / k,
        )


def init_u(leaf: SurfaceLeaf, H) -> FlowState:
    """u = H0 / H for prescribed mean curvature H of the boundary."""
    H = np.broadcast_to(np.asarray(H, dtype=float), leaf.w.shape)
    if not np.all(np.isfinite(H)) or np.any(H <= 0):
        raise ValueError("mean curvature H must be finite and positive")
    if np.any(leaf.H0 <= 0):
        raise ValueError("reference mean curvature H0 must be positive")
    return FlowState(leaf.rho, leaf, leaf.H0 / H)


def init_from_u(leaf: SurfaceLeaf, u0) -> FlowState:
    u0 = np.broadcast_to(np.asarray(u0, dtype=float), leaf.w.shape).copy()
    return init_u(leaf, leaf.H0 / u0)


def rhs(leaf: SurfaceLeaf, u):
    n, k = leaf.n, leaf.k
    op = leaf.laplacian()
    lap = op.filtered(op.divergence(u)) / leaf.w
    H0 = leaf.H0
    q = H0 * H0 - leaf.A_norm_sq + 2 * (n - 1) * k * k
    return u * u / H0 * lap + (u - u**3) * q / (2 * H0)


def stable_step(leaf: SurfaceLeaf, u, safety: float = 1.0) -> float:
    """Heun step bound from the Gershgorin radius of the linearized operator."""
    n, k = leaf.n, leaf.k
    H0 = leaf.H0
    diff = u * u / H0 * leaf.laplacian().stiffness()
    q = H0 * H0 - leaf.A_norm_sq + 2 * (n - 1) * k * k
    react = np.abs(q * (1 - 3 * u * u) / (2 * H0))
    return safety / float(np.max(diff + 0.5 * react))


def _check(u, rho, bounds):
    if not np.all(np.isfinite(u)):
        raise FlowError("non-finite u (divergence)", rho, "divergence")
    if np.any(u <= 0):
        raise FlowError("u became nonpositive (flow breakdown)", rho, "breakdown")
    lo, hi = bounds
    if u.min() < lo or u.max() > hi:
        raise FlowError(f"u left [{lo:g}, {hi:g}] (divergence)", rho, "divergence")


def step(state: FlowState, drho: float, *, u_bounds=(1e-3, 1e3), check_stability: bool = True) -> FlowState:
    if drho <= 0:
        raise ValueError("step size must be positive")
    if check_stability and drho > stable_step(state.leaf, state.u) * (1 + 1e-12):
        raise ValueError("step exceeds the stability bound")
    u = state.u
    k1 = rhs(state.leaf, u)
    nxt = leaf_at(state.leaf, state.rho + drho)
    k2 = rhs(nxt, u + drho * k1)
    u_new = u + 0.5 * drho * (k1 + k2)
    _check(u_new, nxt.rho, u_bounds)
    return FlowState(nxt.rho, nxt, u_new)


@dataclass
class TraceRow:
    rho: float
    u: np.ndarray
    u_min: float
    u_max: float
    sup_u_minus_1: float
    mass: np.ndarray  # sum (H0 - H) W
    mass_X: np.ndarray  # sum (H0 - H) X
    cosh_mass: float
    dmass: np.ndarray  # analytic derivative of ``mass`` at this rho
    dmass_interval: np.ndarray  # analytic derivative integrated over the preceding interval
    mass_scale: float
    cosh_scale: float
    dmass_scale: float
    steps: int


@dataclass
class FlowTrace:
    leaf0: SurfaceLeaf
    ctx: MassContext
    rows: list = field(default_factory=list)

    @property
    def rhos(self):
        return np.array([r.rho for r in self.rows])

    def leaf(self, i: int) -> SurfaceLeaf:
        return leaf_at(self.leaf0, self.rows[i].rho)

    def fd_interval(self, i: int):
        """(mass difference, integrated analytic derivative) over the interval ending at row i."""
        return self.rows[i].mass - self.rows[i - 1].mass, self.rows[i].dmass_interval


def _deriv_scale(leaf, u, alpha):
    s = np.ones(leaf.X.shape[-1])
    s[-1] = alpha
    mag = lambda V: np.linalg.norm(V[..., :-1], axis=-1) + np.abs(V[..., -1])  # noqa: E731
    H0 = leaf.H0
    term = 0.5 * np.abs(H0 * H0 - leaf.A_norm_sq) * mag(leaf.X * s) + H0 * mag(leaf.N * s)
    return float(np.sum(leaf.w * (u - 1) ** 2 / u * term))


def _row(state: FlowState, ctx: MassContext, interval, steps) -> TraceRow:
    leaf, u = state.leaf, state.u
    return TraceRow(
        rho=state.rho,
        u=u.copy(),
        u_min=float(u.min()),
        u_max=float(u.max()),
        sup_u_minus_1=float(np.abs(u - 1).max()),
        mass=mass_vector(leaf, u, ctx.alpha),
        mass_X=mass_vector(leaf, u, 1.0),
        cosh_mass=cosh_mass(leaf, u),
        dmass=mass_derivative_vector(leaf, u, ctx.alpha),
        dmass_interval=interval,
        mass_scale=mass_scale(leaf, u, ctx.alpha),
        cosh_scale=cosh_mass_scale(leaf, u),
        dmass_scale=_deriv_scale(leaf, u, ctx.alpha),
        steps=steps,
    )


def run(state0: FlowState, config: FlowConfig, ctx: MassContext) -> FlowTrace:
    k = state0.leaf.k
    rho_max, stride, max_step = config.resolved(k)
    trace = FlowTrace(state0.leaf, ctx)
    state = state0
    dim = state.leaf.grid.to_full(state.leaf.X[:1]).shape[-1]
    trace.rows.append(_row(state, ctx, np.full(dim, np.nan), 0))
    n_rows = int(math.floor(rho_max / stride + 1e-9))
    targets = [state0.rho + stride * (i + 1) for i in range(n_rows)]
    if not targets or targets[-1] < rho_max - 1e-12:
        targets.append(rho_max)
    D_prev = trace.rows[0].dmass
    for target in targets:
        acc = np.zeros(dim)
        steps = 0
        eps = 1e-12 * max(1.0, target)
        while target - state.rho > eps:
            dt = min(stable_step(state.leaf, state.u, config.safety), max_step)
            if state.rho + dt > target - eps:
                dt = target - state.rho  # land on the output row
            state = step(state, dt, u_bounds=config.u_bounds, check_stability=False)
            D = mass_derivative_vector(state.leaf, state.u, ctx.alpha)
            acc += 0.5 * dt * (D_prev + D)
            D_prev = D
            steps += 1
        trace.rows.append(_row(state, ctx, acc, steps))
    return trace


@dataclass(frozen=True)
class LimitFields:
    v: np.ndarray
    gamma: np.ndarray
    dmu: np.ndarray
    g_inf: np.ndarray
    flagged: bool
    spread: float


def _richardson(rows, n, k):
    (r1, u1), (r2, u2) = rows
    q1, q2 = np.exp(n * k * r1) * (u1 - 1), np.exp(n * k * r2) * (u2 - 1)
    s1, s2 = math.exp(-2 * k * r1), math.exp(-2 * k * r2)
    return (q2 * s1 - q1 * s2) / (s1 - s2)


def extract_v(trace: FlowTrace) -> LimitFields:
    """v = lim e^{nk rho}(u - 1), extrapolated assuming an e^{-2k rho} correction."""
    leaf0 = trace.leaf0
    n, k = leaf0.n, leaf0.k
    if len(trace.rows) < 3 or trace.rows[-1].rho < 4.0 / k - 1e-9:
        raise ValueError("extract_v needs a trace reaching rho >= 4/k")
    pts = [(r.rho, r.u) for r in trace.rows[-3:]]
    v_a = _richardson(pts[:2], n, k)
    v_b = _richardson(pts[1:], n, k)
    size = float(np.abs(v_b).max())
    spread = float(np.abs(v_b - v_a).max() / size) if size > 0 else 0.0
    gamma, dmu = limit_measure(leaf0)
    b = leaf0.base
    M = (np.eye(b.A.shape[-1]) + b.A / k) / 2
    g0 = leaf0.grid.metric_centers(b.Xf)
    g_inf = np.swapaxes(M, -1, -2) @ g0 @ M
    return LimitFields(v_b, gamma, dmu, g_inf, spread > 0.05, spread)
