"""Acceptance criteria 1-11 at their stated tolerances; one PASS/FAIL line each."""
import pytest

from qsmass import checks as C
from qsmass.config import (
    CliffordConfig,
    FlowCase,
    FlowRunConfig,
    GeometryConfig,
    MassRunConfig,
    NullConfig,
    SpinorConfig,
    _perturbed,
)

SEED = 0


def report(capsys, number, title, results):
    ok = all(c.passed for c in results)
    with capsys.disabled():
        print(f"\nCRITERION {number:2d} {'PASS' if ok else 'FAIL'} {title}")
        for c in results:
            print(f"    {c.line()}")
    assert ok, [c.as_dict() for c in results if not c.passed]


@pytest.fixture(scope="module")
def mass_results():
    cfg = MassRunConfig()
    out = {}
    for case in cfg.cases:
        trace = C.run_case(case)
        out[case.name] = C.mass_checks(case, trace, cfg.checks)[0]
    return out


def _select(mass_results, prefix):
    return [c for res in mass_results.values() for c in res if c.name.startswith(prefix + "[")]


def test_criterion_01_clifford(capsys):
    report(capsys, 1, "Clifford anticommutation and self-adjointness, n=2..9", C.clifford_suite(CliffordConfig()))


def test_criterion_02_null_round_trip(capsys):
    report(capsys, 2, "null round trip, n=2..8, 1000 zeta each", C.null_round_trip(NullConfig(), SEED))


def test_criterion_03_norm_identity(capsys):
    res = [c for c in C.spinor_suite(SpinorConfig(dirac_samples=1), SEED) if c.name == "norm_identity"]
    report(capsys, 3, "spinor norm identity, n=2..8, 1000 samples each", res)


def test_criterion_04_dirac_identity(capsys):
    res = [c for c in C.spinor_suite(SpinorConfig(norm_samples=1), SEED) if c.name == "dirac_identity"]
    report(capsys, 4, "hypersurface Dirac identity on geodesic spheres", res)


def test_criterion_05_identity_orders(capsys):
    report(capsys, 5, "position and W identity convergence order", C.geometry_suite(GeometryConfig()))


def test_criterion_06_fixed_point(capsys):
    cfg = FlowRunConfig(cases=[FlowCase(name="fixed_n3", surface=_perturbed(3)), FlowCase(name="fixed_n4", surface=_perturbed(4))])
    res = []
    for case in cfg.cases:
        res += [c for c in C.flow_checks(case, C.run_case(case), cfg.checks) if c.name.startswith("fixed_point")]
    assert len(res) == 2
    report(capsys, 6, "u = 1 preserved over [0, 6/k]", res)


def test_criterion_07_decay_rate(capsys):
    cfg = FlowRunConfig()
    res = []
    for case in cfg.cases:
        res += [c for c in C.flow_checks(case, C.run_case(case), cfg.checks) if c.name.startswith("decay_rate")]
    assert len(res) == 2
    report(capsys, 7, "decay exponent of sup|u-1| within 10% of nk", res)


def test_criterion_08_monotonicity(capsys, mass_results):
    res = _select(mass_results, "monotone") + _select(mass_results, "derivative_fd")
    assert len(res) == 10
    report(capsys, 8, "mass monotonicity and analytic vs FD derivative", res)


def test_criterion_09_integrand_sign(capsys, mass_results):
    res = _select(mass_results, "integrand_sign") + _select(mass_results, "geodesic_ineq")
    assert len(res) == 10
    report(capsys, 9, "integrand sign and geodesic inequalities", res)


def test_criterion_10_main_sign(capsys, mass_results):
    res = _select(mass_results, "mass_sign")
    assert len(res) == 5 and all(c.detail["applicable"] for c in res)
    report(capsys, 10, "mass sign, causal limit vector, cosh-mass limit", res)


def test_criterion_11_limit_formula(capsys, mass_results):
    res = _select(mass_results, "limit_formula")
    assert len(res) == 5
    report(capsys, 11, "trace tail vs limit formula", res)
