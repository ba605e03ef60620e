"""Run configurations for the batch driver, one model per subcommand.

Every model has defaults reproducing the acceptance setup, so each
subcommand runs without a config file.
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from .flow import FlowConfig
from .surface import SurfaceSpec

SCHEMA_VERSION = 1


class _Model(BaseModel):
    model_config = ConfigDict(extra="forbid")


def _range_check(lo, hi, floor):
    if lo < floor or hi < lo:
        raise ValueError(f"need {floor} <= n_min <= n_max")


class CliffordConfig(_Model):
    n_min: int = 2
    n_max: int = 9
    tol: float = Field(1e-13, gt=0)

    @model_validator(mode="after")
    def _check(self):
        _range_check(self.n_min, self.n_max, 2)
        return self


class NullConfig(_Model):
    """Either a single zeta (with n) or a random sweep over n_min..n_max."""

    zeta: Optional[list[float]] = None
    n_min: int = 2
    n_max: int = 8
    samples: int = Field(1000, ge=1)
    tol: float = Field(1e-10, gt=0)

    @model_validator(mode="after")
    def _check(self):
        if self.zeta is not None:
            if len(self.zeta) < 3:
                raise ValueError("zeta needs n + 1 >= 3 entries")
        else:
            _range_check(self.n_min, self.n_max, 2)
        return self


class SpinorConfig(_Model):
    n_min: int = 2
    n_max: int = 8
    norm_samples: int = Field(1000, ge=1)
    k_range: tuple[float, float] = (0.25, 4.0)
    norm_tol: float = Field(1e-11, gt=0)
    radii: list[float] = [0.5, 1.0, 2.0]
    k_values: list[float] = [0.5, 1.0]
    dirac_n: list[int] = [3, 4, 5]
    dirac_samples: int = Field(50, ge=1)
    dirac_tol: float = Field(1e-12, gt=0)

    @model_validator(mode="after")
    def _check(self):
        _range_check(self.n_min, self.n_max, 2)
        lo, hi = self.k_range
        if not 0 < lo <= hi:
            raise ValueError("k_range must be positive and ordered")
        if min(self.radii) <= 0 or min(self.k_values) <= 0 or min(self.dirac_n) < 2:
            raise ValueError("radii and k must be positive, n >= 2")
        return self


def _perturbed(n, mode="axisymmetric", **grid):
    prof = {"type": "perturbed_sphere", "r0": 1.0, "eps": 0.1}
    if mode == "full2sphere":
        prof["axis"] = [0.3, 1.0, 0.2]
    return SurfaceSpec(n=n, mode=mode, profile=prof, grid=grid)


class GeometryCase(_Model):
    name: str
    surface: SurfaceSpec
    resolutions: list[int] = Field(min_length=3)
    alpha: Optional[float] = Field(None, gt=1)


class GeometryConfig(_Model):
    cases: list[GeometryCase] = [
        GeometryCase(name="perturbed_n3_full", surface=_perturbed(3, "full2sphere"), resolutions=[16, 32, 64]),
        GeometryCase(name="perturbed_n4_axi", surface=_perturbed(4), resolutions=[64, 128, 256]),
    ]
    min_order: float = 1.8


class InitialData(_Model):
    """u0 + u0_axis * y1^2 (y1 the axis component of the chart direction), or H0/H for constant H."""

    u0: float = Field(1.0, gt=0)
    u0_axis: float = 0.0
    H: Optional[float] = None

    @model_validator(mode="after")
    def _check(self):
        if self.H is not None and (self.u0 != 1.0 or self.u0_axis != 0.0):
            raise ValueError("give either H or u0/u0_axis, not both")
        if self.H is None and self.u0 + min(self.u0_axis, 0.0) <= 0:
            raise ValueError("initial u must be positive")
        return self


class FlowCase(_Model):
    name: str
    surface: SurfaceSpec
    initial: InitialData = InitialData()
    flow: FlowConfig = FlowConfig()


def _case(name, surface, **init):
    return FlowCase(name=name, surface=surface, initial=InitialData(**init))


def acceptance_cases() -> list[FlowCase]:
    full = SurfaceSpec(
        n=3,
        mode="full2sphere",
        profile={"type": "ellipsoidal", "r0": 1.0, "coeffs": [0.1, -0.05, 0.03]},
        grid={"n_theta": 64, "n_phi": 128},
    )
    return [
        _case("sphere_n3", SurfaceSpec(n=3, profile={"type": "sphere", "r0": 1.0}), u0=1.5),
        _case("perturbed_n3", _perturbed(3), u0=1.25, u0_axis=0.25),
        _case("perturbed_n4", _perturbed(4), u0=1.25, u0_axis=0.25),
        _case(
            "offcenter_n3",
            SurfaceSpec(n=3, profile={"type": "offcenter_sphere", "radius": 1.2, "offset": 0.4}),
            u0=1.3,
        ),
        _case("ellipsoidal_n3_full", full, u0=1.25, u0_axis=0.25),
    ]


class FlowChecks(_Model):
    monotone_tol: float = 1e-8
    decay_tol: float = Field(0.1, gt=0)
    decay_fit_start: float = Field(2.0, ge=0)  # in units of 1/k
    fixed_point_tol: float = 1e-12
    directions: int = Field(32, ge=1)


class FlowRunConfig(_Model):
    cases: list[FlowCase] = Field(
        default_factory=lambda: [
            _case("perturbed_n3", _perturbed(3), u0=1.25, u0_axis=0.25),
            _case("perturbed_n4", _perturbed(4), u0=1.25, u0_axis=0.25),
        ]
    )
    zeta_ref: Optional[list[float]] = None
    checks: FlowChecks = FlowChecks()


class MassChecks(_Model):
    directions: int = Field(32, ge=1)
    monotone_tol: float = 1e-8
    fd_tol: float = 0.01
    integrand_tol: float = 1e-10
    geodesic_tol: float = 1e-6
    sign_tol: float = 1e-8
    limit_tol: float = 0.02


class MassRunConfig(_Model):
    cases: list[FlowCase] = Field(default_factory=acceptance_cases)
    checks: MassChecks = MassChecks()


def load(model, path: Optional[str]):
    """Parse ``path`` (JSON) into ``model``; defaults when path is None."""
    if path is None:
        return model()
    doc = json.loads(Path(path).read_text())
    return model.model_validate(doc)
