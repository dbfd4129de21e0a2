"""Scenario ingestion and command dispatch.

Scenario files are JSON; complex numbers are 2-element ``[re, im]`` arrays,
basis fields list column vectors, operator matrices list rows.  Commands
emit a JSON report (to ``--out`` or stdout) and exit with 0 on success or a
certified gap, 1 on input errors, and 2 when a property is violated or a
scan is not certified.  Reports are byte-identical for identical inputs and
seed.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass

import numpy as np

from .extensions import (
    ContractionOp,
    ParameterFamily,
    blaschke_family,
    constant_family,
    table_family,
    validate_family,
)
from .gap import arc_scan
from .isometry import (
    INF,
    IsometricOperator,
    PreconditionViolated,
    defect_spaces,
    is_inf_point,
    reflected_point,
    regular_type,
)
from .numerics import DEFAULT_TOL, TolerancePolicy, max_abs
from .resolvents import ResolventFn
from .sampling import disk_grid
from .verify import run_property_suite

__all__ = ["Scenario", "ScenarioError", "parse_scenario", "run_command", "main"]

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_VIOLATION = 2


class ScenarioError(ValueError):
    """Scenario document violates the schema or its own invariants."""


@dataclass(frozen=True)
class Scenario:
    operator: IsometricOperator
    family: ParameterFamily
    z0: complex
    tol: TolerancePolicy


def _complex_from(doc, where: str) -> complex:
    if not (isinstance(doc, (list, tuple)) and len(doc) == 2):
        raise ScenarioError(f"{where}: complex numbers are 2-element [re, im] arrays")
    re, im = doc
    if not all(isinstance(x, (int, float)) for x in (re, im)):
        raise ScenarioError(f"{where}: complex parts must be numbers")
    return complex(re, im)


def _matrix_from_rows(doc, where: str) -> np.ndarray:
    if not isinstance(doc, list):
        raise ScenarioError(f"{where}: expected an array of row arrays")
    rows = []
    for i, row in enumerate(doc):
        if not isinstance(row, list):
            raise ScenarioError(f"{where}: row {i} is not an array")
        rows.append([_complex_from(entry, f"{where}[{i}]") for entry in row])
    if rows and any(len(r) != len(rows[0]) for r in rows):
        raise ScenarioError(f"{where}: ragged rows")
    return np.asarray(rows, dtype=complex) if rows else np.zeros((0, 0), dtype=complex)


def _basis_from_columns(doc, n: int, where: str) -> np.ndarray:
    if not isinstance(doc, list):
        raise ScenarioError(f"{where}: expected an array of column vectors")
    cols = []
    for j, col in enumerate(doc):
        if not isinstance(col, list) or len(col) != n:
            raise ScenarioError(f"{where}: column {j} must be a vector of length {n}")
        cols.append([_complex_from(entry, f"{where}[{j}]") for entry in col])
    if not cols:
        return np.zeros((n, 0), dtype=complex)
    return np.asarray(cols, dtype=complex).T


def parse_scenario(text: str | bytes, tol_override: TolerancePolicy | None = None) -> Scenario:
    """Parse and fully validate a scenario document.

    The domain basis must already be orthonormal; it is rejected, not
    repaired, since re-orthonormalizing would silently change the operator
    under test.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ScenarioError("top-level document must be an object")
    for key in ("ambient_dim", "domain_basis", "image_basis", "z0", "family"):
        if key not in doc:
            raise ScenarioError(f"missing required field {key!r}")

    toler = doc.get("toler")
    if tol_override is not None:
        tol = tol_override
    elif toler is not None:
        if not isinstance(toler, dict):
            raise ScenarioError("toler must be an object")
        try:
            tol = TolerancePolicy(
                eps_rank=float(toler.get("eps_rank", DEFAULT_TOL.eps_rank)),
                eps_eq=float(toler.get("eps_eq", DEFAULT_TOL.eps_eq)),
                eps_unit=float(toler.get("eps_unit", DEFAULT_TOL.eps_unit)),
            )
        except ValueError as exc:
            raise ScenarioError(f"bad tolerance policy: {exc}") from exc
    else:
        tol = DEFAULT_TOL

    n = doc["ambient_dim"]
    if not isinstance(n, int) or n < 1:
        raise ScenarioError("ambient_dim must be a positive integer")
    domain = _basis_from_columns(doc["domain_basis"], n, "domain_basis")
    image = _basis_from_columns(doc["image_basis"], n, "image_basis")
    if domain.shape[1] != image.shape[1]:
        raise ScenarioError("domain_basis and image_basis must list the same number of columns")
    d = domain.shape[1]
    if d:
        gram_residual = max_abs(domain.conj().T @ domain - np.eye(d))
        if gram_residual > tol.eps_unit:
            raise ScenarioError(
                f"domain basis is not orthonormal (Gram residual {gram_residual:.3e})"
            )
        iso_residual = max_abs(image.conj().T @ image - np.eye(d))
        if iso_residual > tol.eps_unit:
            raise ScenarioError(
                f"images are not isometric (Gram residual {iso_residual:.3e})"
            )
    operator = IsometricOperator(n, domain, image)

    z0 = _complex_from(doc["z0"], "z0")
    if abs(z0) >= 1.0:
        raise ScenarioError("z0 must lie strictly inside the unit disk")

    family = _parse_family(doc["family"], operator, z0, tol)

    report = validate_family(family, operator, disk_grid(12), tol)
    if not report.ok:
        raise ScenarioError("family validation failed: " + "; ".join(report.violations))
    return Scenario(operator, family, z0, tol)


def _contraction(operator: IsometricOperator, z0: complex, matrix: np.ndarray, tol: TolerancePolicy) -> ContractionOp:
    src = defect_spaces(operator, z0, tol).n
    dst = defect_spaces(operator, reflected_point(z0), tol).n
    if matrix.shape != (dst.dim, src.dim):
        raise ScenarioError(
            f"family matrix shape {matrix.shape} does not match defect dimensions "
            f"({dst.dim}, {src.dim})"
        )
    try:
        return ContractionOp(src, dst, matrix)
    except ValueError as exc:
        raise ScenarioError(f"family matrix: {exc}") from exc


def _parse_family(doc, operator: IsometricOperator, z0: complex, tol: TolerancePolicy) -> ParameterFamily:
    if not isinstance(doc, dict) or "kind" not in doc:
        raise ScenarioError("family must be an object with a 'kind'")
    kind = doc["kind"]
    if kind == "constant":
        if "matrix" not in doc:
            raise ScenarioError("constant family needs a 'matrix'")
        c = _contraction(operator, z0, _matrix_from_rows(doc["matrix"], "family.matrix"), tol)
        return constant_family(c, z0)
    if kind == "blaschke":
        if "matrix" not in doc or "a" not in doc:
            raise ScenarioError("blaschke family needs 'matrix' and 'a'")
        u0 = _contraction(operator, z0, _matrix_from_rows(doc["matrix"], "family.matrix"), tol)
        a = _complex_from(doc["a"], "family.a")
        try:
            return blaschke_family(a, u0, z0, tol)
        except ValueError as exc:
            raise ScenarioError(f"family: {exc}") from exc
    if kind == "table":
        points = doc.get("points")
        if not isinstance(points, list) or not points:
            raise ScenarioError("table family needs a non-empty 'points' array")
        table = []
        for i, entry in enumerate(points):
            if not isinstance(entry, dict) or "zeta" not in entry or "matrix" not in entry:
                raise ScenarioError(f"family.points[{i}] must carry 'zeta' and 'matrix'")
            zeta = _complex_from(entry["zeta"], f"family.points[{i}].zeta")
            c = _contraction(
                operator, z0, _matrix_from_rows(entry["matrix"], f"family.points[{i}].matrix"), tol
            )
            table.append((zeta, c))
        return table_family(table, z0)
    raise ScenarioError(f"unknown family kind {kind!r}")


def _jsonify_complex(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def _jsonify_matrix(m: np.ndarray) -> list:
    return [[_jsonify_complex(complex(m[i, j])) for j in range(m.shape[1])] for i in range(m.shape[0])]


def _parse_point(re: float, im: float):
    if math.isinf(re) or math.isinf(im):
        return INF
    return complex(re, im)


def _cmd_defect(scenario: Scenario, args) -> tuple[dict, int]:
    zeta = _parse_point(args.zeta[0], args.zeta[1]) if args.zeta else 0j
    pair = defect_spaces(scenario.operator, zeta, scenario.tol)
    report = {
        "zeta": "INF" if is_inf_point(zeta) else _jsonify_complex(complex(zeta)),
        "dim_m": pair.m.dim,
        "dim_n": pair.n.dim,
        "m_basis": _jsonify_matrix(pair.m.basis),
        "n_basis": _jsonify_matrix(pair.n.basis),
    }
    if not is_inf_point(zeta):
        rt = regular_type(scenario.operator, complex(zeta), scenario.tol)
        report["regular_type_at_point"] = {
            "is_regular": rt.is_regular,
            "sigma_min": rt.sigma_min if math.isfinite(rt.sigma_min) else "inf",
        }
        if complex(zeta) != 0:
            inv = 1.0 / complex(zeta).conjugate()
            rt_inv = regular_type(scenario.operator, inv, scenario.tol)
            report["regular_type_at_circle_inverse"] = {
                "point": _jsonify_complex(inv),
                "is_regular": rt_inv.is_regular,
                "sigma_min": rt_inv.sigma_min if math.isfinite(rt_inv.sigma_min) else "inf",
            }
    return report, EXIT_OK


def _cmd_resolvent(scenario: Scenario, args) -> tuple[dict, int, list[str] | None]:
    r = ResolventFn(scenario.operator, scenario.family, scenario.z0)
    if args.grid is not None:
        points = disk_grid(args.grid)
        points = points + [1.0 / z.conjugate() for z in points if z != 0]
        values = []
        csv_lines = ["zeta_re,zeta_im,entry_row,entry_col,value_re,value_im"]
        for z in points:
            m = r.at(z, scenario.tol)
            values.append({"zeta": _jsonify_complex(z), "matrix": _jsonify_matrix(m)})
            for i in range(m.shape[0]):
                for j in range(m.shape[1]):
                    csv_lines.append(
                        f"{z.real!r},{z.imag!r},{i},{j},{m[i, j].real!r},{m[i, j].imag!r}"
                    )
        return {"points": values}, EXIT_OK, csv_lines
    if not args.zeta:
        raise ScenarioError("resolvent needs --zeta or --grid")
    z = complex(args.zeta[0], args.zeta[1])
    if abs(abs(z) - 1.0) <= scenario.tol.eps_unit:
        raise ScenarioError("resolvent is evaluated off the unit circle only")
    m = r.at(z, scenario.tol)
    branch = "interior" if abs(z) < 1 else "exterior"
    return {"zeta": _jsonify_complex(z), "branch": branch, "matrix": _jsonify_matrix(m)}, EXIT_OK, None


def _cmd_gap_scan(scenario: Scenario, args) -> tuple[dict, int]:
    if not args.arc:
        raise ScenarioError("gap-scan needs --arc t1 t2")
    try:
        report = arc_scan(
            scenario.operator,
            scenario.family,
            (args.arc[0], args.arc[1]),
            scenario.z0,
            n_samples=args.samples,
            tol=scenario.tol,
            continuity_bound=args.continuity_bound,
        )
    except PreconditionViolated as exc:
        return {"verdict": "PRECONDITION_VIOLATED", "error": str(exc)}, EXIT_VIOLATION
    doc = {
        "verdict": report.verdict,
        "arc": [report.arc[0], report.arc[1]],
        "z0": _jsonify_complex(report.z0),
        "n_samples": report.n_samples,
        "continuity_certification": report.continuity_certification,
        "samples": [
            {
                "index": s.index,
                "angle": s.angle,
                "point": _jsonify_complex(s.point),
                "cond1": s.cond1,
                "cond2": s.cond2,
                "cond3_link": s.cond3_link,
                "cond3_direct": s.cond3_direct,
                "cond_pm": s.cond_pm,
                "sigma_cw": s.sigma_cw if math.isfinite(s.sigma_cw) else "inf",
                "sigma_direct": s.sigma_direct,
                "failures": s.failures(),
            }
            for s in report.samples
        ],
    }
    return doc, EXIT_OK if report.certified else EXIT_VIOLATION


def _cmd_verify(scenario: Scenario, args) -> tuple[dict, int]:
    results = run_property_suite(
        scenario.operator, scenario.family, scenario.z0, seed=args.seed, tol=scenario.tol
    )
    doc = {
        "properties": [
            {"name": r.name, "passed": r.passed, "detail": r.detail} for r in results
        ],
        "all_passed": all(r.passed for r in results),
    }
    return doc, EXIT_OK if doc["all_passed"] else EXIT_VIOLATION


def run_command(scenario: Scenario, command: str, args) -> tuple[dict, int, list[str] | None]:
    """Dispatch one CLI command; returns (report, exit_code, csv_lines)."""
    csv_lines = None
    if command == "defect":
        report, code = _cmd_defect(scenario, args)
    elif command == "resolvent":
        report, code, csv_lines = _cmd_resolvent(scenario, args)
    elif command == "gap-scan":
        report, code = _cmd_gap_scan(scenario, args)
    elif command == "verify":
        report, code = _cmd_verify(scenario, args)
    else:
        raise ScenarioError(f"unknown command {command!r}")
    report = {"command": command, "seed": args.seed, **report}
    return report, code, csv_lines


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="isoresolvent",
        description="Defect subspaces, generalized resolvents and spectral gap scans "
        "for closed isometric operators on C^n.",
    )
    parser.add_argument("scenario", help="path to the scenario JSON document")
    parser.add_argument(
        "command", choices=["defect", "resolvent", "gap-scan", "verify"], help="what to run"
    )
    parser.add_argument("--arc", nargs=2, type=float, metavar=("T1", "T2"), help="open arc in radians")
    parser.add_argument("--samples", type=int, default=9, help="arc samples (default 9)")
    parser.add_argument(
        "--continuity-bound",
        type=float,
        default=None,
        help="modulus bound for tabulated families in gap-scan",
    )
    parser.add_argument("--zeta", nargs=2, type=float, metavar=("RE", "IM"), help="evaluation point")
    parser.add_argument("--grid", type=int, default=None, help="emit the resolvent on an N-point grid (+ mirrors)")
    parser.add_argument("--seed", type=int, default=0, help="seed for the randomized suites (default 0)")
    parser.add_argument("--out", default=None, help="write the JSON report here instead of stdout")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        with open(args.scenario, "rb") as fh:
            text = fh.read()
    except OSError as exc:
        print(f"error: cannot read scenario: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        scenario = parse_scenario(text)
        if args.command == "resolvent" and args.grid is not None and args.out is None:
            raise ScenarioError("resolvent --grid needs --out (the CSV is written next to it)")
        report, code, csv_lines = run_command(scenario, args.command, args)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT

    payload = json.dumps(report, indent=2) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(payload)
        if csv_lines is not None:
            with open(args.out + ".csv", "w") as fh:
                fh.write("\n".join(csv_lines) + "\n")
    else:
        sys.stdout.write(payload)
    return code


if __name__ == "__main__":
    sys.exit(main())
