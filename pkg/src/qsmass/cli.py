"""Batch driver.

Exit codes: 0 all checks pass, 1 invalid input, 2 numerical failure,
3 check violation.  Each subcommand prints one PASS/FAIL line per check and
writes its report under ``--out``.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np
from pydantic import ValidationError

from . import checks as C
from .config import (
    SCHEMA_VERSION,
    CliffordConfig,
    FlowRunConfig,
    GeometryConfig,
    MassRunConfig,
    NullConfig,
    SpinorConfig,
    load,
)
from .flow import FlowError
from .hyperbolic import lorentz_dot

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC, EXIT_CHECK = 0, 1, 2, 3

CSV_COLUMNS_HEAD = ["rho", "u_min", "u_max", "sup_u_minus_1"]
CSV_COLUMNS_TAIL = ["cosh_mass", "dmass_fd", "dmass_analytic"]


def csv_columns(n: int) -> list[str]:
    """Frozen trace column order; mass_0 is the time component, mass_1..mass_n the spatial ones."""
    return CSV_COLUMNS_HEAD + [f"mass_{i}" for i in range(n + 1)] + CSV_COLUMNS_TAIL


def _fmt(x) -> str:
    return repr(float(x))


def _write_json(path: Path, doc: dict):
    path.write_text(json.dumps(doc, indent=2, sort_keys=True, allow_nan=True) + "\n")


def _doc(command: str, **body) -> dict:
    return {"schema": f"qsmass.{command}/{SCHEMA_VERSION}", **body}


def _report(checks) -> int:
    for c in checks:
        print(c.line())
    return EXIT_OK if all(c.passed for c in checks) else EXIT_CHECK


def write_trace_csv(path: Path, trace, zeta_ref):
    n = trace.leaf0.n
    zeta_ref = np.asarray(zeta_ref, dtype=float)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(csv_columns(n))
        for i, r in enumerate(trace.rows):
            m = np.concatenate([r.mass[-1:], r.mass[:-1]])  # time first
            if i == 0:
                fd = an = float("nan")
            else:
                drho = r.rho - trace.rows[i - 1].rho
                diff, integ = trace.fd_interval(i)
                fd = lorentz_dot(diff, zeta_ref) / drho
                an = lorentz_dot(integ, zeta_ref) / drho
            vals = [r.rho, r.u_min, r.u_max, r.sup_u_minus_1, *m, r.cosh_mass, fd, an]
            w.writerow([_fmt(v) for v in vals])


def _reference_zeta(n, given):
    if given is None:
        z = np.zeros(n + 1)
        z[0] = z[-1] = 1.0
        return z
    z = np.asarray(given, dtype=float)
    if z.shape != (n + 1,) or z[-1] <= 0 or abs(lorentz_dot(z, z)) > 1e-12 * z[-1] ** 2:
        raise ValueError("zeta_ref must be a future null vector of length n + 1")
    return z


# -- subcommands -------------------------------------------------------------


def cmd_clifford_verify(args, out: Path) -> int:
    cfg = load(CliffordConfig, args.config)
    res = C.clifford_suite(cfg)
    _write_json(out / "clifford_verify.json", _doc("clifford-verify", config=cfg.model_dump(), checks=[c.as_dict() for c in res]))
    return _report(res)


def cmd_null_decompose(args, out: Path) -> int:
    cfg = load(NullConfig, args.config)
    if args.zeta is not None:
        cfg = NullConfig(**{**cfg.model_dump(), "zeta": json.loads(args.zeta)})
    if cfg.zeta is not None:
        res = C.null_decompose(cfg.zeta)
        _write_json(out / "null_decompose.json", _doc("null-decompose", zeta=cfg.zeta, **res))
        print(json.dumps({"a": res["a"], "residual": res["residual"]}))
        return EXIT_OK if res["residual"] < cfg.tol else EXIT_CHECK
    res = C.null_round_trip(cfg, args.seed)
    _write_json(out / "null_decompose.json", _doc("null-decompose", seed=args.seed, checks=[c.as_dict() for c in res]))
    return _report(res)


def cmd_spinor_verify(args, out: Path) -> int:
    cfg = load(SpinorConfig, args.config)
    res = C.spinor_suite(cfg, args.seed)
    _write_json(out / "spinor_verify.json", _doc("spinor-verify", seed=args.seed, checks=[c.as_dict() for c in res]))
    return _report(res)


def cmd_geometry_verify(args, out: Path) -> int:
    cfg = load(GeometryConfig, args.config)
    res = C.geometry_suite(cfg)
    _write_json(out / "geometry_verify.json", _doc("geometry-verify", checks=[c.as_dict() for c in res]))
    return _report(res)


def _run_cases(cfg, out: Path, summarize, command: str, filename: str) -> int:
    cases, all_checks, status = [], [], EXIT_OK
    for case in cfg.cases:
        try:
            trace = C.run_case(case)
        except FlowError as e:
            print(f"FAIL {case.name}: {e}", file=sys.stderr)
            cases.append({"name": case.name, "error": str(e), "kind": e.kind, "rho": e.rho})
            status = EXIT_NUMERIC
            continue
        entry, res = summarize(case, trace)
        all_checks += res
        cases.append({"name": case.name, **entry, "checks": [c.as_dict() for c in res]})
    _write_json(out / filename, _doc(command, cases=cases))
    code = _report(all_checks)
    return status if status != EXIT_OK else code


def cmd_flow(args, out: Path) -> int:
    cfg = load(FlowRunConfig, args.config)

    def summarize(case, trace):
        zeta = _reference_zeta(trace.leaf0.n, cfg.zeta_ref)
        write_trace_csv(out / f"{case.name}.trace.csv", trace, zeta)
        last = trace.rows[-1]
        res = C.flow_checks(case, trace, cfg.checks)
        terminal = {
            "rho": last.rho,
            "u_min": last.u_min,
            "u_max": last.u_max,
            "sup_u_minus_1": last.sup_u_minus_1,
            "mass": last.mass.tolist(),
            "cosh_mass": last.cosh_mass,
            "decay_exponent": C.decay_exponent(trace, cfg.checks.decay_fit_start),
            "steps": int(sum(r.steps for r in trace.rows)),
            "zeta_ref": zeta.tolist(),
        }
        return {"terminal": terminal}, res

    return _run_cases(cfg, out, summarize, "flow", "flow_summary.json")


def cmd_mass(args, out: Path) -> int:
    cfg = load(MassRunConfig, args.config)

    def summarize(case, trace):
        res, report = C.mass_checks(case, trace, cfg.checks)
        return report, res

    return _run_cases(cfg, out, summarize, "mass", "mass_report.json")


COMMANDS = {
    "clifford-verify": cmd_clifford_verify,
    "null-decompose": cmd_null_decompose,
    "spinor-verify": cmd_spinor_verify,
    "flow": cmd_flow,
    "mass": cmd_mass,
    "geometry-verify": cmd_geometry_verify,
}


def _u64(text: str) -> int:
    v = int(text)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qsmass", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        s = sub.add_parser(name)
        s.add_argument("--config", help="JSON config; defaults reproduce the acceptance setup")
        s.add_argument("--out", default="out", help="output directory")
        s.add_argument("--seed", type=_u64, default=0)
        if name == "null-decompose":
            s.add_argument("--zeta", help="future null vector as a JSON array (x_1..x_n, t)")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_INPUT
    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
        return COMMANDS[args.command](args, out)
    except (ValidationError, ValueError, OSError) as e:
        print(f"invalid input: {e}", file=sys.stderr)
        return EXIT_INPUT
    except (FlowError, FloatingPointError, np.linalg.LinAlgError) as e:
        print(f"numerical failure: {e}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
