"""Bundled model problems and random instance generation.

The bundled models (a diagonal two-by-two, a single nilpotent chain block,
a coupled three-dimensional model, and the golden 2x2 rational example)
are used by the CLI and the test suite.  Random instances draw a
well-conditioned Gram matrix with prescribed inertia, a metric-self-adjoint
operator as ``J^-1 H`` with H Hermitian, and a Gaussian gamma map; the
construction makes self-adjointness exact up to rounding.

``instance_check`` runs the full invariant battery on one seeded instance
and is the engine behind ``pkit fuzz``.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _la
from .config import resolve_tol
from .decomposition import inverse_decomposition, verification_grid
from .errors import (
    DegenerateMinimalSubspace,
    GramProductSingular,
    NotInResolventSet,
    PkitError,
    SingularValue,
)
from .inversion import (
    build_context,
    inverse_gamma_adjoint,
    inverse_realization,
    inverse_value,
    resolvent_difference_residual,
    schur_value,
    verify_multivalued_part,
)
from .nevanlinna import (
    RationalFunction,
    Realization,
    RealizationFunction,
    bounded_realization,
    evaluate,
    exact_negative_index,
    is_minimal,
    negative_squares_sampled,
)
from .pontryagin import PontryaginSpace, hermitian_inertia, j_adjoint
from .relations import (
    adjoint_relation,
    is_selfadjoint_relation,
    relations_equal,
    resolvent,
)

__all__ = [
    "diag_model",
    "jordan_model",
    "coupled_model",
    "example1_components",
    "example1_realization",
    "example1_closed_form",
    "random_space",
    "random_selfadjoint_matrix",
    "random_bounded",
    "planted_alpha_instance",
    "InstanceResult",
    "FuzzSummary",
    "instance_check",
    "run_fuzz",
]


# ---------------------------------------------------------------------------
# bundled models


def diag_model() -> Realization:
    """J = diag(1,-1), A = diag(1,-1), gamma = I; Q(z) = diag(1/(1-z), 1/(1+z))."""
    space = PontryaginSpace(np.diag([1.0, -1.0]))
    return bounded_realization(space, np.diag([1.0, -1.0]), np.eye(2))


def jordan_model() -> Realization:
    """Single nilpotent chain block: J the flip matrix, A the shift, gamma = I."""
    space = PontryaginSpace(np.array([[0.0, 1.0], [1.0, 0.0]]))
    return bounded_realization(space, np.array([[0.0, 1.0], [0.0, 0.0]]), np.eye(2))


def coupled_model() -> Realization:
    """Three-dimensional minimal model whose inverse splits with indices (0, 1).

    J = diag(1,1,-1) and A couples the third direction to the range of
    gamma = [e1 e2], so the vanishing part of the inverse lives on span{e3}.
    """
    j = np.diag([1.0, 1.0, -1.0])
    h = np.array([[0.0, 0.0, 1.0], [0.0, 2.0, 0.0], [1.0, 0.0, 3.0]])
    space = PontryaginSpace(j)
    return bounded_realization(space, np.linalg.solve(j, h), np.eye(3)[:, :2])


def example1_components() -> tuple[Realization, Realization]:
    """The two minimally represented summands of the golden 2x2 example."""
    hilbert = PontryaginSpace(np.eye(2))
    r1 = bounded_realization(hilbert, np.zeros((2, 2)), np.eye(2))
    flip = np.array([[0.0, 1.0], [1.0, 0.0]])
    space2 = PontryaginSpace(flip)
    r2 = bounded_realization(space2, np.array([[0.0, 1.0], [0.0, 0.0]]), flip)
    return r1, r2


def example1_realization() -> Realization:
    """The golden 4-dimensional sum representation (not minimal)."""
    from .decomposition import sum_realizations

    r1, r2 = example1_components()
    return sum_realizations(r1, r2)


def example1_closed_form() -> RationalFunction:
    """Closed form -[[1/z + 1/z^2, 1/z], [1/z, 1/z]] of the golden example."""
    p0 = -np.array([[1.0, 0.0], [0.0, 0.0]])
    p1 = -np.array([[1.0, 1.0], [1.0, 1.0]])
    return RationalFunction([p0, p1], [0.0, 0.0, 1.0])


# ---------------------------------------------------------------------------
# random instances


def random_space(rng: np.random.Generator, dim: int, neg: int | None = None) -> PontryaginSpace:
    """Well-conditioned Gram matrix with prescribed negative count."""
    if dim == 0:
        return PontryaginSpace(np.zeros((0, 0)))
    if neg is None:
        neg = int(rng.integers(0, dim + 1))
    signs = np.array([-1.0] * neg + [1.0] * (dim - neg))
    rng.shuffle(signs)
    q1, _ = np.linalg.qr(rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim)))
    s = q1 @ np.diag(rng.uniform(0.8, 1.25, size=dim))
    j = s.conj().T @ np.diag(signs) @ s
    return PontryaginSpace(_la.herm_part(j))


def random_selfadjoint_matrix(rng: np.random.Generator, space: PontryaginSpace, norm: float = 1.0) -> np.ndarray:
    """Metric-self-adjoint operator ``J^-1 H`` with H Hermitian, scaled to norm."""
    n = space.dim
    if n == 0:
        return np.zeros((0, 0), dtype=complex)
    h = _la.herm_part(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
    a = np.linalg.solve(space.gram, h)
    scale = _la.spectral_norm(a)
    return a * (norm / scale) if scale > 0 else a


def random_bounded(
    rng: np.random.Generator,
    dim: int,
    coeff_dim: int | None = None,
    *,
    invertible_gram_product: bool | None = None,
    require_minimal: bool = False,
    max_tries: int = 200,
) -> Realization:
    """Random bounded realization with controlled conditioning.

    ``invertible_gram_product=True`` resamples gamma until
    ``gamma+ gamma`` has condition number below 50; ``False`` forces a
    singular gram product by duplicating a gamma column.
    """
    for _ in range(max_tries):
        space = random_space(rng, dim)
        a = random_selfadjoint_matrix(rng, space)
        m = coeff_dim if coeff_dim is not None else int(rng.integers(1, dim + 1))
        gamma = rng.standard_normal((dim, m)) + 1j * rng.standard_normal((dim, m))
        gamma /= max(1.0, _la.spectral_norm(gamma))
        if invertible_gram_product is False and m >= 2:
            gamma[:, -1] = gamma[:, 0]
        r = bounded_realization(space, a, gamma)
        if invertible_gram_product:
            g = r.gamma_adj @ r.gamma
            smallest, largest = _la.smallest_largest_sv(g)
            if largest == 0.0 or smallest < largest / 50.0:
                continue
        if require_minimal and not is_minimal(r):
            continue
        return r
    raise PkitError("could not draw a random instance with the requested properties")


def _sip(length: int) -> np.ndarray:
    return np.fliplr(np.eye(length))


def planted_alpha_instance(
    rng: np.random.Generator,
    alpha: float,
    chain_sizes: tuple[int, ...],
    chain_signs: tuple[int, ...],
    n_positive: int = 1,
    extra_eigs: tuple[float, ...] = (),
    extra_signs: tuple[int, ...] = (),
    gamma_top_column: bool = True,
) -> tuple[Realization, dict]:
    """Instance with planted Jordan structure at a real alpha.

    Canonical blocks (Jordan blocks with flip-matrix Grams at alpha,
    positive eigenvectors at alpha, signed scalars at other eigenvalues)
    are conjugated by a random well-conditioned map, which preserves
    self-adjointness relative to the transported Gram.  When
    ``gamma_top_column`` is set, the first gamma column is exactly the top
    vector of the first chain, so the pole cancellation function has the
    pure power form for h = e1.
    """
    blocks_a = []
    blocks_j = []
    top_index = None
    pos = 0
    for size, sign in zip(chain_sizes, chain_signs):
        blocks_a.append(alpha * np.eye(size) + np.diag(np.ones(size - 1), 1))
        blocks_j.append(sign * _sip(size))
        if top_index is None:
            top_index = pos + size - 1
        pos += size
    for _ in range(n_positive):
        blocks_a.append(np.array([[alpha]]))
        blocks_j.append(np.array([[1.0]]))
        pos += 1
    for eig, sign in zip(extra_eigs, extra_signs):
        blocks_a.append(np.array([[eig]]))
        blocks_j.append(np.array([[float(sign)]]))
        pos += 1
    n = pos
    a0 = np.zeros((n, n), dtype=complex)
    j0 = np.zeros((n, n), dtype=complex)
    at = 0
    for ba, bj in zip(blocks_a, blocks_j):
        d = ba.shape[0]
        a0[at : at + d, at : at + d] = ba
        j0[at : at + d, at : at + d] = bj
        at += d
    geo_mult = len(chain_sizes) + n_positive
    m = geo_mult + 1
    gamma0 = rng.standard_normal((n, m)) + 1j * rng.standard_normal((n, m))
    if gamma_top_column and top_index is not None:
        gamma0[:, 0] = 0.0
        gamma0[top_index, 0] = 1.0

    q1, _ = np.linalg.qr(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
    s = q1 @ np.diag(rng.uniform(0.85, 1.2, size=n))
    s_inv = np.linalg.inv(s)
    a = s_inv @ a0 @ s
    j = _la.herm_part(s.conj().T @ j0 @ s)
    gamma = s_inv @ gamma0
    space = PontryaginSpace(j)
    r = bounded_realization(space, a, gamma)
    meta = {
        "chain_sizes": chain_sizes,
        "n_positive": n_positive,
        "kappa": space.neg_index,
        "generator_h": np.eye(m, dtype=complex)[:, 0] if gamma_top_column else None,
        "top_length": chain_sizes[0] if chain_sizes else 0,
    }
    return r, meta


# ---------------------------------------------------------------------------
# the fuzz battery


@dataclass(frozen=True)
class InstanceResult:
    seed: int
    dim: int
    coeff_dim: int
    status: str  # "pass" | "fail" | "skip"
    failures: tuple = field(default_factory=tuple)
    skip_reason: str = ""


@dataclass(frozen=True)
class FuzzSummary:
    seed: int
    count: int
    max_dim: int
    passed: int
    skipped: int
    failed: int
    results: tuple

    @property
    def ok(self) -> bool:
        return self.failed == 0


def _safe_points(rng: np.random.Generator, count: int, spectra, min_dist: float = 0.25) -> list[complex]:
    points: list[complex] = []
    tries = 0
    while len(points) < count and tries < 200 * count:
        tries += 1
        z = complex(rng.uniform(-3.0, 3.0), rng.uniform(0.4, 3.0))
        if all(np.min(np.abs(sp - z)) >= min_dist for sp in spectra if sp.size):
            points.append(z)
    while len(points) < count:
        points.append(complex(0.0, 2.0 + 0.3 * len(points)))
    return points


def instance_check(seed: int, max_dim: int = 6, tol: float | None = None) -> InstanceResult:
    """Run the invariant battery on one seeded random instance.

    Core identities (adjoint involutions, resolvent identity, symmetry,
    index agreement) always run.  The inversion battery (inverse product,
    Schur cross-check, one-sided product, index-additive split, resolvent
    difference, multivalued part) runs when the gram product is invertible;
    otherwise the instance counts as skipped with a reason.  Every ninth
    instance deliberately forces a singular gram product.
    """
    t = resolve_tol(tol)
    rng = np.random.default_rng(np.random.SeedSequence(entropy=seed))
    dim = int(rng.integers(2, max_dim + 1))
    force_singular = seed % 9 == 3
    failures: list[str] = []

    r = random_bounded(
        rng,
        dim,
        coeff_dim=int(rng.integers(1, dim + 1)) if not force_singular else max(2, dim // 2),
        invertible_gram_product=False if force_singular else True,
    )
    space, a = r.space, r.a_matrix
    spectrum = np.linalg.eigvals(a)

    def check(label: str, resid: float, bound: float = 1e-8):
        if not resid <= bound:
            failures.append(f"{label}: residual {resid:.3e}")

    # metric adjoint involution and self-adjointness by construction
    check(
        "adjoint involution",
        _la.spectral_norm(j_adjoint(j_adjoint(a, space), space) - a),
    )
    check("JA hermitian", float(not _la.is_hermitian(space.gram @ a, 1e-8)))
    check(
        "relation adjoint involution",
        float(not relations_equal(adjoint_relation(adjoint_relation(r.op)), r.op)),
    )
    check("graph self-adjoint", float(not is_selfadjoint_relation(r.op)))

    zs = _safe_points(rng, 4, [spectrum])
    z1, z2 = zs[0], zs[1]
    r1m, r2m = resolvent(r.op, z1), resolvent(r.op, z2)
    check(
        "resolvent identity",
        _la.spectral_norm(r1m - r2m - (z1 - z2) * (r1m @ r2m)),
        1e-7,
    )
    check(
        "resolvent conjugate symmetry",
        _la.spectral_norm(
            j_adjoint(resolvent(r.op, z1), space) - resolvent(r.op, np.conj(z1))
        ),
        1e-7,
    )
    check(
        "value symmetry",
        _la.spectral_norm(evaluate(r, np.conj(z2)).conj().T - evaluate(r, z2)),
    )

    sampled = negative_squares_sampled(RealizationFunction(r), tol=t)
    if sampled.value > space.neg_index:
        failures.append(
            f"sampled kappa {sampled.value} exceeds ambient index {space.neg_index}"
        )
    minimal = is_minimal(r, t)
    try:
        exact = exact_negative_index(r, t)
        if exact.value != sampled.value:
            failures.append(f"kappa mismatch: exact {exact.value} vs sampled {sampled.value}")
        if minimal and exact.value != space.neg_index:
            failures.append("minimal instance with kappa below ambient index")
        kappa = exact.value
    except DegenerateMinimalSubspace:
        kappa = sampled.value

    skip_reason = ""
    try:
        ctx = build_context(r, t)
    except GramProductSingular as exc:
        ctx = None
        skip_reason = f"gram product singular (smallest sv {exc.smallest_sv:.3e})"

    if ctx is not None:
        comp_spec = np.linalg.eigvals(ctx.comp_op) if ctx.comp_op.size else np.zeros(0)
        for z in _safe_points(rng, 5, [spectrum, comp_spec]):
            q = evaluate(r, z)
            qhat = inverse_value(ctx, z)
            check(f"inverse product at {z:.2f}", _la.spectral_norm(q @ qhat + np.eye(r.coeff_dim)))
            check(f"inverse product (flipped) at {z:.2f}", _la.spectral_norm(qhat @ q + np.eye(r.coeff_dim)))
            check(f"schur route at {z:.2f}", _la.spectral_norm(schur_value(ctx, z) - q))
            check(
                f"one-sided product at {z:.2f}",
                _la.spectral_norm(inverse_gamma_adjoint(ctx, z) - qhat @ ctx.gamma_adj),
            )
            check(
                f"inverse symmetry at {z:.2f}",
                _la.spectral_norm(inverse_value(ctx, np.conj(z)).conj().T - qhat),
            )
        try:
            report = inverse_decomposition(r, t)
            if minimal:
                if not report.kappa_additive:
                    failures.append(
                        f"inverse split indices {report.kappa_sum} != kappa {report.kappa_whole}"
                    )
                if report.components[0].kappa != hermitian_inertia(ctx.gram_product).n_minus:
                    failures.append("affine part index differs from gram product inertia")
            check("inverse split pointwise", report.residual)
            z0 = 1j * (1.0 + float(np.max(np.abs(spectrum))) if spectrum.size else 1.0)
            rhat = inverse_realization(r, z0, t)
            if not is_selfadjoint_relation(rhat.op):
                failures.append("inverse relation is not self-adjoint")
            mv = verify_multivalued_part(r, z0, t)
            if not mv.ok:
                failures.append(
                    f"multivalued part mismatch (distance {mv.distance:.3e})"
                )
            for z in _safe_points(rng, 3, [spectrum, comp_spec]):
                check(
                    f"resolvent difference at {z:.2f}",
                    resolvent_difference_residual(r, rhat, z, t),
                )
        except (NotInResolventSet, SingularValue) as exc:
            skip_reason = f"inversion battery aborted: {exc}"

    if failures:
        status = "fail"
    elif skip_reason and ctx is None:
        status = "skip"
    else:
        status = "pass"
    return InstanceResult(seed, dim, r.coeff_dim, status, tuple(failures), skip_reason)


def run_fuzz(seed: int, count: int, max_dim: int, jobs: int = 1, tol: float | None = None) -> FuzzSummary:
    """Run the battery on ``count`` derived seeds; merge by instance index.

    Results are deterministic for a fixed base seed regardless of ``jobs``:
    instance k always uses seed ``seed + k`` and the merge is by index.
    """
    seeds = [seed + k for k in range(count)]
    if jobs > 1 and count > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_check_star, [(s, max_dim, tol) for s in seeds]))
    else:
        results = [instance_check(s, max_dim, tol) for s in seeds]
    passed = sum(1 for r in results if r.status == "pass")
    skipped = sum(1 for r in results if r.status == "skip")
    failed = sum(1 for r in results if r.status == "fail")
    return FuzzSummary(seed, count, max_dim, passed, skipped, failed, tuple(results))


def _check_star(args) -> InstanceResult:
    return instance_check(*args)
