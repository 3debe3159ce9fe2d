"""Command-line front end.

Subcommands: ``inspect`` (structure and index report), ``eval`` (value at
a point), ``invert`` (inverse values, identities and the index-additive
split), ``decompose`` (split over an invariant subspace), ``jordan``
(eigenvalue block decomposition and pole cancellation), ``fuzz``
(randomized invariant battery), ``example1`` (golden built-in example).

Exit codes are stable: 0 success, 1 parse error, 2 evaluation-domain
error, 3 precondition violation.  Numbers print with 15 significant
digits, fields in fixed order, LF line endings; output for a fixed seed is
reproducible run to run.  The ``PKIT_TOL`` environment variable overrides
the default tolerance.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import _la
from .config import default_tol
from .decomposition import (
    inverse_decomposition,
    split_by_invariant_subspace,
    sum_decomposition_probe,
    verification_grid,
)
from .errors import (
    DegenerateMinimalSubspace,
    DegenerateSubspace,
    GramProductSingular,
    NoGenerator,
    NotEigenvalue,
    NotHermitian,
    NotInResolventSet,
    NotInvariant,
    NotMinimal,
    PkitError,
    ProblemFormatError,
    ProjectorNotJSymmetric,
    SchurSingular,
    SingularValue,
)
from .instances import (
    example1_closed_form,
    example1_realization,
    run_fuzz,
)
from .inversion import build_context, inverse_value, verify_multivalued_part
from .jordan import (
    alpha_decomposition,
    cancellation_exponent,
    chain_generator_in_range,
    pole_cancellation,
)
from .nevanlinna import (
    evaluate,
    exact_negative_index,
    negative_squares_sampled,
    realization_predicates,
)
from .pontryagin import Subspace, hermitian_inertia
from .problems import load_realization, _parse_matrix
from .errors import DegenerateMinimalSubspace as _DegenMin

EXIT_OK = 0
EXIT_PARSE = 1
EXIT_DOMAIN = 2
EXIT_PRECONDITION = 3

_DOMAIN_ERRORS = (NotInResolventSet, SingularValue, SchurSingular)
_PRECONDITION_ERRORS = (
    GramProductSingular,
    NotMinimal,
    NotInvariant,
    DegenerateSubspace,
    DegenerateMinimalSubspace,
    NotEigenvalue,
    NoGenerator,
    ProjectorNotJSymmetric,
    NotHermitian,
)


def _fmt(x: float) -> str:
    x = float(x)
    if x == 0.0:
        x = 0.0  # normalize -0.0
    return f"{x:.15g}"


def _fmt_complex(z: complex) -> str:
    return f"({_fmt(z.real)},{_fmt(z.imag)})"


def _print_matrix(mat: np.ndarray) -> None:
    for row in np.atleast_2d(mat):
        print(" ".join(_fmt_complex(v) for v in row))


def _yesno(flag: bool) -> str:
    return "YES" if flag else "NO"


def _parse_point(text: str) -> complex:
    parts = text.split(",")
    if len(parts) != 2:
        raise ProblemFormatError(f"point must be RE,IM, got {text!r}")
    try:
        return complex(float(parts[0]), float(parts[1]))
    except ValueError as exc:
        raise ProblemFormatError(f"point must be RE,IM, got {text!r}") from exc


def _kappa_report(r):
    sampled = negative_squares_sampled(r)
    try:
        exact = exact_negative_index(r)
        return exact.value, "exact", sampled.value
    except _DegenMin:
        return sampled.value, "sampled", sampled.value


# ---------------------------------------------------------------------------
# subcommands


def cmd_inspect(args) -> int:
    problem = load_realization(args.file)
    r = problem.realization
    inertia = hermitian_inertia(r.space.gram)
    preds = realization_predicates(r)
    kappa, method, sampled = _kappa_report(r)
    print(f"name: {problem.name}")
    print(f"form: {r.form}")
    print(f"dim: {r.dim}")
    print(f"coefficient_dim: {r.coeff_dim}")
    print(f"gram_inertia: {inertia.as_tuple()}")
    print(f"ambient_neg_index: {r.space.neg_index}")
    print(f"minimal: {_yesno(preds.minimal)}")
    print(f"kappa: {kappa}")
    print(f"kappa_method: {method}")
    print(f"kappa_sampled: {sampled}")
    print(f"gamma0_injective: {_yesno(preds.gamma_injective)}")
    print(f"gamma0_adjoint_injective: {_yesno(preds.gamma_adjoint_injective)}")
    print(f"gram_product_injective: {_yesno(preds.gram_product_injective)}")
    if preds.separating is not None:
        print(f"separating: {_yesno(preds.separating)}")
    print(f"implication_failures: {len(preds.implication_failures)}")
    return EXIT_OK


def cmd_eval(args) -> int:
    problem = load_realization(args.file)
    z = _parse_point(args.z)
    value = evaluate(problem.realization, z)
    print(f"z: {_fmt_complex(z)}")
    print("Q:")
    _print_matrix(value)
    return EXIT_OK


def cmd_invert(args) -> int:
    problem = load_realization(args.file)
    r = problem.realization
    ctx = build_context(r)
    points = [_parse_point(p) for p in args.z] if args.z else list(verification_grid([r])[:2])
    worst = 0.0
    for z in points:
        qhat = inverse_value(ctx, z)
        q = evaluate(r, z)
        resid = _la.spectral_norm(q @ qhat + np.eye(r.coeff_dim))
        worst = max(worst, resid)
        print(f"z: {_fmt_complex(z)}")
        print("Qhat:")
        _print_matrix(qhat)
    report = inverse_decomposition(r)
    mv = verify_multivalued_part(r)
    print(f"product_residual: {_fmt(worst)}")
    print(f"kappa_hat_1: {report.components[0].kappa}")
    print(f"kappa_hat_2: {report.components[1].kappa}")
    print(f"kappa: {report.kappa_whole}")
    print(f"kappa_additive: {_yesno(report.kappa_additive)}")
    print(f"split_residual: {_fmt(report.residual)}")
    print(f"multivalued_part_matches_gamma_range: {_yesno(mv.ok)}")
    print(f"multivalued_distance: {_fmt(mv.distance)}")
    return EXIT_OK


def cmd_decompose(args) -> int:
    problem = load_realization(args.file)
    r = problem.realization
    import json

    try:
        with open(args.subspace, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ProblemFormatError(f"cannot read subspace file: {exc}") from exc
    if not isinstance(data, dict) or "basis" not in data:
        raise ProblemFormatError("subspace file must be an object with a 'basis' matrix")
    basis = _parse_matrix(data["basis"], "basis", rows=r.dim)
    sub = Subspace(r.space, basis)
    report = split_by_invariant_subspace(r, sub)
    for comp in report.components:
        print(f"component {comp.label}: dim={comp.realization.dim} kappa={comp.kappa} ({comp.kappa_method})")
    print(f"kappa_sum: {report.kappa_sum}")
    print(f"kappa: {report.kappa_whole}")
    print(f"kappa_additive: {_yesno(report.kappa_additive)}")
    print(f"residual: {_fmt(report.residual)}")
    return EXIT_OK


def cmd_jordan(args) -> int:
    problem = load_realization(args.file)
    r = problem.realization
    dec = alpha_decomposition(r, args.alpha)
    print(f"alpha: {_fmt(args.alpha)}")
    print(f"blocks: {len(dec.blocks)}")
    for i, block in enumerate(dec.blocks):
        line = f"block {i}: kind={block.kind} dim={block.subspace.dim} kappa={block.kappa}"
        if block.chain is not None:
            line += f" length={block.chain.length}"
        print(line)
    print(f"kappa_total: {dec.kappa_total}")
    print(f"sum_residual: {_fmt(dec.residual)}")
    for i, block in enumerate(dec.chain_blocks):
        chain = block.chain
        chain_generator_in_range(r, chain)  # NoGenerator -> exit 3
        line = f"chain {i}: length={chain.length} generator_found=YES"
        # The pure-power decay law needs the chain top inside range(gamma0);
        # report the fitted rate only when that holds.
        top = chain.vectors[-1]
        h0, *_ = np.linalg.lstsq(r.gamma, top, rcond=None)
        if np.linalg.norm(r.gamma @ h0 - top) <= 1e-8 * max(1.0, np.linalg.norm(top)):
            rate = cancellation_exponent(pole_cancellation(r, chain))
            line += f" eta_rate={rate:.3f} expected={chain.length}"
        else:
            line += " eta_rate=skipped (top outside range(gamma0))"
        print(line)
    return EXIT_OK


def cmd_fuzz(args) -> int:
    summary = run_fuzz(args.seed, args.count, args.max_dim, jobs=args.jobs)
    print(f"seed: {summary.seed}")
    print(f"count: {summary.count}")
    print(f"max_dim: {summary.max_dim}")
    print(f"pass: {summary.passed}")
    print(f"skip: {summary.skipped}")
    print(f"fail: {summary.failed}")
    for result in summary.results:
        if result.status == "skip":
            print(f"instance {result.seed}: skipped ({result.skip_reason})")
    for result in summary.results:
        if result.status == "fail":
            for failure in result.failures:
                print(f"instance {result.seed}: FAIL {failure}")
    return EXIT_OK if summary.ok else EXIT_DOMAIN


def cmd_example1(args) -> int:
    r = example1_realization()
    closed = example1_closed_form()
    grid = verification_grid([r, closed], count=20)
    worst = 0.0
    for z in grid:
        a = evaluate(r, z)
        b = closed.evaluate(z)
        worst = max(worst, _la.spectral_norm(a - b) / max(1.0, _la.spectral_norm(b)))
    preds = realization_predicates(r)
    kappa, method, sampled = _kappa_report(r)
    probe = sum_decomposition_probe(r)
    print(f"Q(z) matches closed form: {'PASS' if worst <= 1e-10 else 'FAIL'} (max rel err {_fmt(worst)})")
    print(f"representation minimal: {_yesno(preds.minimal)}")
    print(f"Gamma0 injective: {_yesno(preds.gamma_injective)}")
    print(f"Gamma0+ injective: {_yesno(preds.gamma_adjoint_injective)}")
    print(f"Gamma0+Gamma0 injective: {_yesno(preds.gram_product_injective)}")
    print(f"separating property holds: {_yesno(bool(preds.separating))}")
    print(f"kappa exact: {kappa}")
    print(f"kappa sampled: {sampled}")
    print(f"component kappas: {probe.component_kappas[0]} {probe.component_kappas[1]}")
    print(f"components minimal: {_yesno(all(probe.component_minimal))}")
    print(f"kappa additive: {_yesno(probe.kappa_additive)}")
    print(f"sum residual: {_fmt(probe.sum_residual)}")
    try:
        build_context(r)
        print("gram product invertible: YES")
    except GramProductSingular as exc:
        print(f"gram product invertible: NO (smallest sv {_fmt(exc.smallest_sv)})")
    return EXIT_OK


# ---------------------------------------------------------------------------
# entry point


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pkit",
        description="Indefinite-metric state-space toolkit for generalized Nevanlinna functions.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("inspect", help="structure, minimality and index report")
    p.add_argument("file")
    p.set_defaults(func=cmd_inspect)

    p = sub.add_parser("eval", help="evaluate Q at a point")
    p.add_argument("file")
    p.add_argument("--z", required=True, help="point as RE,IM")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("invert", help="inverse values, identities and index split")
    p.add_argument("file")
    p.add_argument("--z", action="append", help="point as RE,IM (repeatable)")
    p.set_defaults(func=cmd_invert)

    p = sub.add_parser("decompose", help="split over an invariant subspace")
    p.add_argument("file")
    p.add_argument("--subspace", required=True, help="JSON file with a 'basis' matrix")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("jordan", help="eigenvalue block decomposition")
    p.add_argument("file")
    p.add_argument("--alpha", required=True, type=float)
    p.set_defaults(func=cmd_jordan)

    p = sub.add_parser("fuzz", help="randomized invariant battery")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--max-dim", type=int, default=6)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_fuzz)

    p = sub.add_parser("example1", help="golden built-in example")
    p.set_defaults(func=cmd_example1)

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        default_tol()  # fail fast on a malformed PKIT_TOL
        return args.func(args)
    except ProblemFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except _DOMAIN_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except _PRECONDITION_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except PkitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
