"""Problem files: JSON serialization of realizations.

A problem file is UTF-8 JSON with row-major nested arrays for matrices and
two-element arrays ``[re, im]`` for complex scalars (plain numbers are
accepted on input and mean a real entry).  The operator may be given as a
matrix (operator graph) or as a relation ``{"M": ..., "N": ...}``.
Writing is canonical: fixed field order, every entry as ``[re, im]``, LF
line endings, so written files are stable for golden tests.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import _la
from .config import resolve_tol
from .errors import PkitError, ProblemFormatError
from .nevanlinna import BOUNDED, GENERAL, Realization
from .pontryagin import PontryaginSpace
from .relations import LinearRelation, from_operator, operator_matrix

__all__ = ["Problem", "parse_problem", "problem_to_dict", "write_problem", "load_realization"]


@dataclass(frozen=True)
class Problem:
    name: str
    description: str
    realization: Realization


def _parse_entry(value, where: str) -> complex:
    if isinstance(value, (int, float)):
        return complex(value)
    if (
        isinstance(value, list)
        and len(value) == 2
        and all(isinstance(v, (int, float)) for v in value)
    ):
        return complex(value[0], value[1])
    raise ProblemFormatError(f"{where}: expected a number or [re, im], got {value!r}")


def _parse_matrix(obj, field: str, rows: int | None = None, cols: int | None = None) -> np.ndarray:
    if not isinstance(obj, list) or (obj and not all(isinstance(row, list) for row in obj)):
        raise ProblemFormatError(f"{field}: expected a list of rows")
    parsed_rows = []
    width = None
    for i, row in enumerate(obj):
        entries = [_parse_entry(v, f"{field}[{i}][{j}]") for j, v in enumerate(row)]
        if width is None:
            width = len(entries)
        elif len(entries) != width:
            raise ProblemFormatError(
                f"{field}[{i}]: row has {len(entries)} entries, expected {width}"
            )
        parsed_rows.append(entries)
    mat = np.array(parsed_rows, dtype=complex) if parsed_rows else np.zeros((0, 0), dtype=complex)
    if rows is not None and mat.shape[0] != rows:
        raise ProblemFormatError(f"{field}: expected {rows} rows, got {mat.shape[0]}")
    if cols is not None and mat.shape[0] and mat.shape[1] != cols:
        raise ProblemFormatError(f"{field}: expected {cols} columns, got {mat.shape[1]}")
    return mat


def parse_problem(data, tol: float | None = None) -> Problem:
    """Build a validated problem from a parsed-JSON dictionary.

    Raises
    ------
    ProblemFormatError
        On structural problems; library validation errors are re-wrapped
        with the offending field named.
    """
    t = resolve_tol(tol)
    if not isinstance(data, dict):
        raise ProblemFormatError("problem file must contain a JSON object")
    unknown = set(data) - {"name", "description", "gram", "A", "gamma0", "z0", "form", "ref_value_adj"}
    if unknown:
        raise ProblemFormatError(f"unknown fields: {sorted(unknown)}")
    for required in ("gram", "A", "gamma0"):
        if required not in data:
            raise ProblemFormatError(f"missing required field {required!r}")
    name = str(data.get("name", ""))
    description = str(data.get("description", ""))

    gram = _parse_matrix(data["gram"], "gram")
    try:
        space = PontryaginSpace(gram, t)
    except PkitError as exc:
        raise ProblemFormatError(f"gram: {exc}") from exc

    a_field = data["A"]
    if isinstance(a_field, dict):
        extra = set(a_field) - {"M", "N"}
        if extra:
            raise ProblemFormatError(f"A: unknown relation fields {sorted(extra)}")
        m = _parse_matrix(a_field.get("M"), "A.M", rows=space.dim)
        n_mat = _parse_matrix(a_field.get("N"), "A.N", rows=space.dim)
        try:
            op = LinearRelation(space, m, n_mat, t)
        except (PkitError, ValueError) as exc:
            raise ProblemFormatError(f"A: {exc}") from exc
    else:
        a_mat = _parse_matrix(a_field, "A", rows=space.dim, cols=space.dim)
        try:
            op = from_operator(a_mat, space, t)
        except (PkitError, ValueError) as exc:
            raise ProblemFormatError(f"A: {exc}") from exc

    gamma = _parse_matrix(data["gamma0"], "gamma0", rows=space.dim)

    form = data.get("form")
    if form is None:
        form = GENERAL if "z0" in data else BOUNDED
    if form not in (BOUNDED, GENERAL):
        raise ProblemFormatError(f"form: expected 'bounded' or 'general', got {form!r}")

    try:
        if form == BOUNDED:
            realization = Realization(space, op, gamma, BOUNDED, tol=t)
        else:
            if "z0" not in data:
                raise ProblemFormatError("general form requires z0")
            z0 = _parse_entry(data["z0"], "z0")
            if "ref_value_adj" in data:
                const = _parse_matrix(data["ref_value_adj"], "ref_value_adj")
            else:
                # derive the anchoring constant from the bounded data
                bounded = Realization(space, op, gamma, BOUNDED, tol=t)
                from .nevanlinna import to_general

                return Problem(name, description, to_general(bounded, z0, t))
            realization = Realization(space, op, gamma, GENERAL, z0, const, tol=t)
    except ProblemFormatError:
        raise
    except (PkitError, ValueError) as exc:
        raise ProblemFormatError(f"realization: {exc}") from exc
    return Problem(name, description, realization)


def _matrix_out(mat: np.ndarray) -> list:
    return [[[float(v.real), float(v.imag)] for v in row] for row in np.asarray(mat, dtype=complex)]


def problem_to_dict(problem: Problem) -> dict:
    """Canonical dictionary form (fixed field order, [re, im] entries)."""
    r = problem.realization
    out: dict = {
        "name": problem.name,
        "description": problem.description,
        "form": r.form,
        "gram": _matrix_out(r.space.gram),
    }
    try:
        out["A"] = _matrix_out(operator_matrix(r.op))
    except ValueError:
        out["A"] = {"M": _matrix_out(r.op.domain_gens), "N": _matrix_out(r.op.range_gens)}
    out["gamma0"] = _matrix_out(r.gamma)
    if r.form == GENERAL:
        out["z0"] = [float(r.ref_point.real), float(r.ref_point.imag)]
        out["ref_value_adj"] = _matrix_out(r.ref_value_adj)
    return out


def write_problem(problem: Problem, path) -> None:
    """Write the canonical JSON form with LF line endings."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(problem_to_dict(problem), fh, indent=2)
        fh.write("\n")


def load_realization(path, tol: float | None = None) -> Problem:
    """Read and validate a problem file."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ProblemFormatError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ProblemFormatError(f"{path} is not valid JSON: {exc}") from exc
    return parse_problem(data, tol)
