"""Verification suites: each returns named pass/fail checks plus a JSON-ready report."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .clifford import (
    a_of_null,
    anticommutation_residual,
    build_clifford,
    dirac_identity_check,
    random_ball_points,
    random_null_directions,
    random_spinors,
    selfadjoint_residual,
    verify_norm_identity,
    zeta_of_a,
)
from .config import (
    CliffordConfig,
    FlowCase,
    FlowChecks,
    GeometryConfig,
    MassChecks,
    NullConfig,
    SpinorConfig,
)
from .flow import FlowTrace, extract_v, init_from_u, init_u, run
from .hyperbolic import lorentz_dot
from .mass import (
    classify_causal,
    compute_context,
    geodesic_slacks,
    integrand_B,
    limit_mass_formula,
    null_directions,
    spinor_mass_pairing,
)
from .surface import build_leaf, verify_position_laplacian, verify_w_laplacian


@dataclass
class Check:
    name: str
    passed: bool
    value: float
    threshold: float
    detail: dict = field(default_factory=dict)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.name}: {self.value:.3e} (threshold {self.threshold:.3e})"

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": bool(self.passed),
            "value": float(self.value),
            "threshold": float(self.threshold),
            "detail": self.detail,
        }


def _upper(name, value, threshold, **detail):
    return Check(name, bool(value < threshold), float(value), threshold, detail)


def _lower(name, value, threshold, **detail):
    return Check(name, bool(value >= threshold), float(value), threshold, detail)


# -- spinor algebra ----------------------------------------------------------


def clifford_suite(cfg: CliffordConfig) -> list[Check]:
    anti, sa = {}, {}
    for n in range(cfg.n_min, cfg.n_max + 1):
        rep = build_clifford(n)
        anti[n] = anticommutation_residual(rep)
        sa[n] = selfadjoint_residual(rep)
    return [
        _upper("anticommutation", max(anti.values()), cfg.tol, per_n=anti),
        _upper("self_adjointness", max(sa.values()), cfg.tol, per_n=sa),
    ]


def null_decompose(zeta) -> dict:
    zeta = np.asarray(zeta, dtype=float)
    rep = build_clifford(len(zeta) - 1)
    a = a_of_null(rep, zeta)
    back = zeta_of_a(rep, a)
    residual = float(np.linalg.norm(back - zeta / zeta[-1]))
    return {"n": rep.n, "a": [[float(z.real), float(z.imag)] for z in a], "residual": residual}


def null_round_trip(cfg: NullConfig, seed: int) -> list[Check]:
    rng = np.random.default_rng(seed)
    worst = {}
    for n in range(cfg.n_min, cfg.n_max + 1):
        rep = build_clifford(n)
        errs = [np.linalg.norm(zeta_of_a(rep, a_of_null(rep, z)) - z) for z in random_null_directions(n, cfg.samples, rng)]
        worst[n] = float(max(errs))
    return [_upper("null_round_trip", max(worst.values()), cfg.tol, per_n=worst)]


def spinor_suite(cfg: SpinorConfig, seed: int) -> list[Check]:
    rng = np.random.default_rng(seed)
    lo, hi = cfg.k_range
    norm_worst = {}
    for n in range(cfg.n_min, cfg.n_max + 1):
        rep = build_clifford(n)
        A = random_spinors(rep, cfg.norm_samples, rng)
        X = random_ball_points(n, cfg.norm_samples, rng)
        K = np.exp(rng.uniform(math.log(lo), math.log(hi), cfg.norm_samples))
        worst = 0.0
        for a, x, k in zip(A, X, K):
            lhs, rhs = verify_norm_identity(rep, a, x, k)
            worst = max(worst, abs(lhs - rhs) / abs(lhs))
        norm_worst[n] = float(worst)
    dirac_worst = {}
    for n in cfg.dirac_n:
        rep = build_clifford(n)
        for r in cfg.radii:
            for k in cfg.k_values:
                s = math.tanh(k * r / 2)  # ball radius of the geodesic sphere
                worst = 0.0
                for a in random_spinors(rep, cfg.dirac_samples, rng):
                    v = rng.standard_normal(n)
                    d = dirac_identity_check(rep, r, a, s * v / np.linalg.norm(v), k, rng=rng)
                    worst = max(worst, d["dirac"] / d["phi_norm"])
                dirac_worst[f"n={n},r={r},k={k}"] = float(worst)
    return [
        _upper("norm_identity", max(norm_worst.values()), cfg.norm_tol, per_n=norm_worst),
        _upper("dirac_identity", max(dirac_worst.values()), cfg.dirac_tol, per_case=dirac_worst),
    ]


# -- surface geometry --------------------------------------------------------


def _orders(vals):
    return [math.log2(a / b) for a, b in zip(vals, vals[1:])]


def geometry_suite(cfg: GeometryConfig) -> list[Check]:
    out = []
    for case in cfg.cases:
        res_X, res_W = [], []
        for N in case.resolutions:
            grid = {"n_theta": N, "n_phi": 2 * N} if case.surface.mode == "full2sphere" else {"n_theta": N}
            spec = case.surface.model_copy(update={"grid": case.surface.grid.model_copy(update=grid)})
            leaf = build_leaf(spec)
            alpha = case.alpha if case.alpha is not None else compute_context(leaf).alpha
            res_X.append(verify_position_laplacian(leaf)["l2"])
            res_W.append(verify_w_laplacian(leaf, alpha)["l2"])
        orders = _orders(res_X) + _orders(res_W)
        out.append(
            _lower(
                f"identity_order[{case.name}]",
                min(orders),
                cfg.min_order,
                resolutions=case.resolutions,
                position_residuals=res_X,
                w_residuals=res_W,
            )
        )
    return out


# -- flow --------------------------------------------------------------------


def initial_state(case: FlowCase):
    leaf = build_leaf(case.surface)
    init = case.initial
    if init.H is not None:
        return init_u(leaf, init.H)
    y1 = leaf.grid.centers(leaf.grid.fine_directions())[..., 0]
    return init_from_u(leaf, init.u0 + init.u0_axis * y1 * y1)


def run_case(case: FlowCase):
    state = initial_state(case)
    ctx = compute_context(state.leaf)
    return run(state, case.flow, ctx)


def decay_exponent(trace: FlowTrace, start: float) -> float:
    """Least-squares exponent of sup|u - 1| over rows with k rho >= start."""
    k = trace.leaf0.k
    rho = trace.rhos
    sup = np.array([r.sup_u_minus_1 for r in trace.rows])
    sel = (k * rho >= start) & (sup > 0)
    if sel.sum() < 2:
        return float("nan")
    slope = np.polyfit(rho[sel], np.log(sup[sel]), 1)[0]
    return float(-slope)


def _monotone_check(name, trace: FlowTrace, Z, tol):
    worst = math.inf
    for row in trace.rows:
        d = lorentz_dot(row.dmass, Z)
        worst = min(worst, float(np.min(d)) / row.dmass_scale if row.dmass_scale > 0 else 0.0)
    return _lower(name, worst, -tol)


def flow_checks(case: FlowCase, trace: FlowTrace, checks: FlowChecks) -> list[Check]:
    leaf0 = trace.leaf0
    n, k = leaf0.n, leaf0.k
    Z = null_directions(n, checks.directions)
    out = [_monotone_check(f"monotone[{case.name}]", trace, Z, checks.monotone_tol)]
    if trace.rows[0].sup_u_minus_1 == 0.0:
        sup = max(r.sup_u_minus_1 for r in trace.rows)
        out.append(_upper(f"fixed_point[{case.name}]", sup, checks.fixed_point_tol))
    elif k * trace.rhos[-1] >= checks.decay_fit_start + 2:
        rate = decay_exponent(trace, checks.decay_fit_start)
        rel = abs(rate - n * k) / (n * k)
        out.append(_upper(f"decay_rate[{case.name}]", rel, checks.decay_tol, exponent=rate, expected=n * k))
    return out


# -- mass --------------------------------------------------------------------


def mass_checks(case: FlowCase, trace: FlowTrace, checks: MassChecks):
    """Checks for monotonicity, integrand sign, mass sign and the limit formula.

    Returns ``(checks, report)`` where report follows the mass JSON layout.
    """
    leaf0, ctx = trace.leaf0, trace.ctx
    n, k = leaf0.n, leaf0.k
    Z = null_directions(n, checks.directions)
    rows = trace.rows
    out = [_monotone_check(f"monotone[{case.name}]", trace, Z, checks.monotone_tol)]

    # interval increments against the integrated analytic derivative
    diffs = np.array([trace.fd_interval(i)[0] for i in range(1, len(rows))])
    integ = np.array([trace.fd_interval(i)[1] for i in range(1, len(rows))])
    err = np.abs(lorentz_dot(diffs[:, None, :] - integ[:, None, :], Z[None])).max(axis=0)
    size = np.abs(lorentz_dot(integ[:, None, :], Z[None])).max(axis=0)
    fd = float(np.max(np.where(size > 0, err / np.where(size > 0, size, 1.0), 0.0)))
    out.append(_upper(f"derivative_fd[{case.name}]", fd, checks.fd_tol))

    B_worst, g_radial, g_angular, g_energy = -math.inf, math.inf, math.inf, math.inf
    for i in range(len(rows)):
        leaf = trace.leaf(i)
        for z in Z:
            B, scale = integrand_B(leaf, ctx, z)
            B_worst = max(B_worst, float(np.max(B / np.maximum(scale, 1e-300))))
            s = geodesic_slacks(leaf, ctx, z)
            g_energy = min(g_energy, float(s["angular_energy"].min()))
            g_radial = min(g_radial, float(s["radial_speed"].min()))
            g_angular = min(g_angular, float(s["angular_speed"].min()))
    out.append(_lower(f"integrand_sign[{case.name}]", -B_worst, -checks.integrand_tol))
    out.append(
        _lower(
            f"geodesic_ineq[{case.name}]",
            min(g_radial, g_angular),
            -checks.geodesic_tol,
            angular_energy_min=g_energy,
        )
    )

    first, tail = rows[0], rows[-1]
    m0 = lorentz_dot(first.mass, Z)
    mt = lorentz_dot(tail.mass, Z)
    limit_vector = tail.mass_X
    cls = classify_causal(limit_vector)
    applicable = bool(np.all(mt <= checks.sign_tol * tail.mass_scale))
    sign_value = float(m0.max() / first.mass_scale) if first.mass_scale > 0 else 0.0
    cosh_value = tail.cosh_mass / tail.cosh_scale if tail.cosh_scale > 0 else 0.0
    sign_ok = (not applicable) or (
        sign_value <= checks.sign_tol and cls == "future-nonspacelike" and cosh_value >= -checks.sign_tol
    )
    out.append(
        Check(
            f"mass_sign[{case.name}]",
            bool(sign_ok),
            sign_value,
            checks.sign_tol,
            {"applicable": applicable, "classification": cls, "cosh_mass_relative": float(cosh_value)},
        )
    )

    lim = extract_v(trace)
    rep = build_clifford(n)
    worst = 0.0
    for z in Z:
        za = zeta_of_a(rep, a_of_null(rep, z))
        tail_val = spinor_mass_pairing(tail.mass_X, za, k)
        formula = limit_mass_formula(leaf0, lim.v, za)
        denom = max(abs(formula), abs(tail_val))
        worst = max(worst, abs(tail_val - formula) / denom if denom > 0 else 0.0)
    out.append(
        _upper(f"limit_formula[{case.name}]", worst, checks.limit_tol, v_spread=lim.spread, v_flagged=lim.flagged)
    )

    report = {
        "context": ctx.as_dict(),
        "rows": [
            {
                "rho": r.rho,
                "mass": r.mass.tolist(),
                "mass_X": r.mass_X.tolist(),
                "cosh_mass": r.cosh_mass,
                "m_zeta_max": float(lorentz_dot(r.mass, Z).max()),
                "dm_zeta_min": float(lorentz_dot(r.dmass, Z).min()),
            }
            for r in rows
        ],
        "limit": {
            "vector": limit_vector.tolist(),
            "classification": cls,
            "cosh_mass": tail.cosh_mass,
            "v_spread": lim.spread,
            "v_flagged": lim.flagged,
        },
    }
    return out, report
