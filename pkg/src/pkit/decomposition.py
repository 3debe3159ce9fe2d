"""Additive decompositions of realized functions.

The central notion: a decomposition ``Q = Q1 + Q2`` with each part a
generalized Nevanlinna function is index-additive when ``kappa1 + kappa2``
equals the negative index of Q.  This module builds such decompositions
from invariant non-degenerate subspaces, composes realizations into sums
and block diagonals, splits a function locally at an eigenvalue of its
operator through spectral projectors, and splits the inverse function into
an affine part plus a part vanishing at infinity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import _la
from .config import resolve_tol
from .errors import (
    DegenerateMinimalSubspace,
    DimensionMismatch,
    NotEigenvalue,
    NotInResolventSet,
    NotInvariant,
    NotMinimal,
    ProjectorNotJSymmetric,
    SingularValue,
)
from .inversion import InversionContext, build_context, inverse_value
from .nevanlinna import (
    BOUNDED,
    GENERAL,
    BlockDiagFunction,
    GNFunction,
    RationalFunction,
    Realization,
    RealizationFunction,
    as_function,
    evaluate,
    exact_negative_index,
    is_minimal,
    negative_squares_sampled,
    to_general,
)
from .pontryagin import (
    PontryaginSpace,
    Subspace,
    hermitian_inertia,
    orthogonal_projection,
    subspace_gram,
)
from .relations import LinearRelation, relation_direct_sum

__all__ = [
    "ComponentRecord",
    "DecompositionReport",
    "verification_grid",
    "split_by_invariant_subspace",
    "sum_realizations",
    "SumMinimalityReport",
    "sum_minimality_report",
    "block_diag",
    "local_split",
    "spectral_projector",
    "inverse_decomposition",
    "SumProbeReport",
    "sum_decomposition_probe",
]


@dataclass(frozen=True)
class ComponentRecord:
    """One component of a decomposition: its function, realization (when a
    state-space form exists), and negative index with provenance."""

    label: str
    function: GNFunction
    realization: Realization | None
    kappa: int
    kappa_method: str


@dataclass(frozen=True)
class DecompositionReport:
    """Outcome of a decomposition.

    ``kappa_additive`` records whether the component indices sum to the
    index of the whole function; ``residual`` is the largest pointwise
    deviation of the component sum from the whole over the verification
    grid.
    """

    components: tuple
    kappa_sum: int
    kappa_whole: int
    kappa_whole_method: str
    kappa_additive: bool
    residual: float
    grid: tuple
    notes: tuple = ()


_GRID_BASE = (
    complex(-2.7, 0.9),
    complex(-1.9, 1.7),
    complex(-1.1, 0.6),
    complex(-0.4, 2.3),
    complex(0.2, 1.1),
    complex(0.8, 0.5),
    complex(1.5, 1.9),
    complex(2.1, 0.7),
    complex(2.6, 1.4),
    complex(0.0, 3.1),
)


def verification_grid(funcs, count: int = 10) -> tuple:
    """Deterministic points in the upper half plane where all funcs evaluate."""
    funcs = [as_function(f) for f in funcs]
    points = []
    k = 0
    while len(points) < count and k < 40 * count:
        base = _GRID_BASE[k % len(_GRID_BASE)]
        z = base + (k // len(_GRID_BASE)) * complex(0.137, 0.211)
        k += 1
        try:
            for f in funcs:
                f.evaluate(z)
        except (NotInResolventSet, SingularValue):
            continue
        points.append(z)
    if len(points) < count:
        raise NotInResolventSet("could not assemble a verification grid")
    return tuple(points)


def _sum_residual(whole, parts, grid) -> float:
    whole = as_function(whole)
    parts = [as_function(p) for p in parts]
    worst = 0.0
    for z in grid:
        total = sum((p.evaluate(z) for p in parts), start=np.zeros((whole.out_dim, whole.out_dim), complex))
        worst = max(worst, _la.spectral_norm(whole.evaluate(z) - total))
    return worst


def _kappa_of(r: Realization, tol: float | None = None) -> tuple[int, str]:
    """Exact negative index when the minimal reduction is non-degenerate,
    else the sampled count."""
    try:
        est = exact_negative_index(r, tol)
    except DegenerateMinimalSubspace:
        est = negative_squares_sampled(RealizationFunction(r), tol=tol)
    return est.value, est.method


# ---------------------------------------------------------------------------
# compression onto invariant subspaces


def _compress(r: Realization, basis: np.ndarray, proj: np.ndarray, tol: float | None = None) -> Realization:
    """Component realization on an invariant subspace.

    ``basis`` has Euclidean-orthonormal columns spanning the subspace and
    ``proj`` is the metric-orthogonal projector onto it.  For a general
    form the component keeps the parent anchor point; the Hermitian part of
    the anchoring constant is split evenly between the two components
    (only the sum and the skew parts are determined by the realization),
    which leaves every verified identity intact.
    """
    t = resolve_tol(tol)
    j_sub = basis.conj().T @ r.space.gram @ basis
    space = PontryaginSpace(j_sub, t)
    gamma_sub = basis.conj().T @ (proj @ r.gamma)
    if r.form == BOUNDED:
        a_sub = basis.conj().T @ r.a_matrix @ basis
        from .relations import from_operator

        return Realization(space, from_operator(a_sub, space, t), gamma_sub, BOUNDED, validate=False, tol=t)
    lift = basis.conj().T @ proj
    m_sub = lift @ r.op.domain_gens
    n_sub = lift @ r.op.range_gens
    op = LinearRelation.from_span(space, np.vstack([m_sub, n_sub]), t)
    gamma_adj_sub = gamma_sub.conj().T @ j_sub
    herm = 0.5 * (r.ref_value_adj + r.ref_value_adj.conj().T)
    skew = 0.5 * (np.conj(r.ref_point) - r.ref_point) * (gamma_adj_sub @ gamma_sub)
    const = 0.5 * herm + skew
    return Realization(space, op, gamma_sub, GENERAL, r.ref_point, const, validate=False, tol=t)


def split_by_invariant_subspace(r: Realization, s: Subspace, tol: float | None = None) -> DecompositionReport:
    """Split a minimal realization over an invariant non-degenerate subspace.

    Produces component realizations on the subspace and its metric-orthogonal
    complement; the component functions sum to the whole pointwise and their
    negative indices add up exactly.

    Raises
    ------
    NotMinimal, DegenerateSubspace, NotInvariant
    """
    t = resolve_tol(tol)
    if not is_minimal(r, t):
        raise NotMinimal("split requires a minimal realization")
    e1 = orthogonal_projection(s, t)  # DegenerateSubspace propagates
    n = r.dim
    e2 = np.eye(n, dtype=complex) - e1
    if r.form == BOUNDED:
        a = r.a_matrix
        leak = _la.spectral_norm(e2 @ a @ e1)
        if leak > t * max(1.0, _la.spectral_norm(a)):
            raise NotInvariant(f"subspace is not invariant (leak {leak:.3e})")
    else:
        rz = _resolvent_of(r, t)
        leak = _la.spectral_norm(e2 @ rz @ e1)
        if leak > 1e2 * t * max(1.0, _la.spectral_norm(rz)):
            raise NotInvariant(f"subspace is not resolvent-invariant (leak {leak:.3e})")
    b1 = _la.range_basis(s.basis, t)
    b2 = _la.projector_range_basis(e2)
    comp1 = _compress(r, b1, e1, t)
    comp2 = _compress(r, b2, e2, t)
    return _assemble_report(r, [("subspace", comp1), ("complement", comp2)], t)


def _resolvent_of(r: Realization, t: float) -> np.ndarray:
    from .relations import resolvent

    return resolvent(r.op, r.ref_point, t)


def _assemble_report(r: Realization, labeled: list, t: float, notes: tuple = ()) -> DecompositionReport:
    components = []
    for label, comp in labeled:
        kappa, method = _kappa_of(comp, t)
        components.append(ComponentRecord(label, RealizationFunction(comp), comp, kappa, method))
    kappa_whole, whole_method = _kappa_of(r, t)
    grid = verification_grid([r] + [c.realization for c in components])
    residual = _sum_residual(r, [c.function for c in components], grid)
    kappa_sum = sum(c.kappa for c in components)
    return DecompositionReport(
        tuple(components),
        kappa_sum,
        kappa_whole,
        whole_method,
        kappa_sum == kappa_whole,
        residual,
        grid,
        notes,
    )


# ---------------------------------------------------------------------------
# sums and block diagonals


def sum_realizations(r1: Realization, r2: Realization, tol: float | None = None) -> Realization:
    """Realization of ``Q1 + Q2`` on the direct sum of the state spaces.

    Both bounded inputs give a bounded sum; otherwise both parts are
    re-anchored at a common reference point and summed in general form.
    The returned realization remembers its summands so sum-specific probes
    can inspect them later.
    """
    t = resolve_tol(tol)
    if r1.coeff_dim != r2.coeff_dim:
        raise DimensionMismatch(
            f"coefficient dimensions differ: {r1.coeff_dim} vs {r2.coeff_dim}"
        )
    if r1.form == BOUNDED and r2.form == BOUNDED:
        op = relation_direct_sum(r1.op, r2.op, t)
        gamma = np.vstack([r1.gamma, r2.gamma])
        return Realization(op.space, op, gamma, BOUNDED, summands=(r1, r2), tol=t)
    z0 = r1.ref_point if r1.form == GENERAL else r2.ref_point
    g1 = to_general(r1, z0, t)
    g2 = to_general(r2, z0, t)
    op = relation_direct_sum(g1.op, g2.op, t)
    gamma = np.vstack([g1.gamma, g2.gamma])
    const = g1.ref_value_adj + g2.ref_value_adj
    return Realization(op.space, op, gamma, GENERAL, z0, const, summands=(r1, r2), tol=t)


@dataclass(frozen=True)
class SumMinimalityReport:
    """Minimality bookkeeping for a sum of two realizations.

    Minimality of the components does not imply minimality of the sum, so
    both facts are reported independently.  The recorded implications:
    an injective stacked gamma-adjoint forces a minimal sum; a minimal
    bounded sum with at least one injective component gamma forces the
    value-separation property of the sum.
    """

    component_minimal: tuple
    component_gamma_injective: tuple
    stacked_gamma_adjoint_injective: bool
    sum_minimal: bool
    sum_separating: bool | None
    implication_failures: tuple


def sum_minimality_report(r1: Realization, r2: Realization, tol: float | None = None) -> SumMinimalityReport:
    t = resolve_tol(tol)
    s = sum_realizations(r1, r2, t)
    comp_min = (is_minimal(r1, t), is_minimal(r2, t))
    comp_inj = (
        _la.svd_rank(r1.gamma, t) == r1.coeff_dim,
        _la.svd_rank(r2.gamma, t) == r2.coeff_dim,
    )
    stacked_inj = _la.svd_rank(s.gamma_adj, t) == s.dim
    sum_min = is_minimal(s, t)
    separating: bool | None = None
    if s.form == BOUNDED:
        from .nevanlinna import realization_predicates

        separating = realization_predicates(s, t).separating
    failures = []
    if stacked_inj and not sum_min:
        failures.append("stacked_gamma_adjoint_injective => sum_minimal")
    if separating is not None and sum_min and any(comp_inj) and not separating:
        failures.append("sum_minimal and a gamma injective => separating")
    return SumMinimalityReport(comp_min, comp_inj, stacked_inj, sum_min, separating, tuple(failures))


def block_diag(f1, f2) -> BlockDiagFunction:
    """Block-diagonal composition; sampled negative indices add."""
    return BlockDiagFunction([f1, f2])


# ---------------------------------------------------------------------------
# local split at an eigenvalue


def spectral_projector(a: np.ndarray, select) -> tuple[np.ndarray, int]:
    """Projector onto the sum of root subspaces of selected eigenvalues,
    along the remaining root subspaces.

    ``select`` maps an eigenvalue to bool.  Computed from an ordered Schur
    form and a Sylvester solve, not by contour quadrature; exact spectral
    separation makes this deterministic in finite dimension.
    """
    n = a.shape[0]
    t_mat, z_mat, sdim = scipy.linalg.schur(a, output="complex", sort=select)
    if sdim == 0:
        return np.zeros((n, n), dtype=complex), 0
    if sdim == n:
        return np.eye(n, dtype=complex), sdim
    t11 = t_mat[:sdim, :sdim]
    t12 = t_mat[:sdim, sdim:]
    t22 = t_mat[sdim:, sdim:]
    rho = scipy.linalg.solve_sylvester(t11, -t22, t12)
    core = np.zeros((n, n), dtype=complex)
    core[:sdim, :sdim] = np.eye(sdim)
    core[:sdim, sdim:] = rho
    return z_mat @ core @ z_mat.conj().T, sdim


def _riesz_projector(a: np.ndarray, alpha: float, cluster_tol: float) -> tuple[np.ndarray, int]:
    proj, sdim = spectral_projector(a, lambda lam: abs(lam - alpha) <= cluster_tol)
    if sdim == 0:
        raise NotEigenvalue(f"alpha = {alpha} is not an eigenvalue (cluster tol {cluster_tol:g})")
    return proj, sdim


def local_split(r: Realization, alpha: float, tol: float | None = None, cluster_tol: float = 1e-7) -> DecompositionReport:
    """Split a bounded-form function at a real eigenvalue of its operator.

    The first component carries the whole root manifold at alpha (so it has
    the same local structure there); the second is holomorphic at alpha.
    When the first component's gram product ``gamma+ gamma`` is singular
    this is reported in the notes rather than repaired.

    Raises
    ------
    NotEigenvalue, ProjectorNotJSymmetric
    """
    t = resolve_tol(tol)
    if r.form != BOUNDED:
        raise ValueError("local split requires a bounded-form realization")
    alpha = float(alpha)
    a = r.a_matrix
    e1, sdim = _riesz_projector(a, alpha, cluster_tol)
    j = r.space.gram
    scale = max(1.0, _la.spectral_norm(e1)) * max(1.0, _la.spectral_norm(j))
    sym_resid = _la.spectral_norm(j @ e1 - e1.conj().T @ j)
    if sym_resid > 1e-7 * scale:
        raise ProjectorNotJSymmetric(
            f"spectral projector at alpha = {alpha} is not metric-symmetric ({sym_resid:.3e})"
        )
    n = r.dim
    e2 = np.eye(n, dtype=complex) - e1
    b1 = _la.projector_range_basis(e1) if sdim < n else np.eye(n, dtype=complex)
    b2 = _la.projector_range_basis(e2)
    comp1 = _compress(r, b1, e1, t)
    comp2 = _compress(r, b2, e2, t)

    notes = []
    g1 = comp1.gamma_adj @ comp1.gamma
    smallest, largest = _la.smallest_largest_sv(g1)
    if g1.size and smallest <= t * largest:
        notes.append(
            f"root-component gram product is singular (smallest sv {smallest:.3e})"
        )
    if comp2.dim:
        gap = float(np.min(np.abs(np.linalg.eigvals(comp2.a_matrix) - alpha)))
        if gap <= cluster_tol:
            notes.append(f"complement spectrum touches alpha (gap {gap:.3e})")
    return _assemble_report(
        r, [(f"root[{alpha:g}]", comp1), ("complement", comp2)], t, tuple(notes)
    )


# ---------------------------------------------------------------------------
# index-additive split of the inverse


def inverse_decomposition(r: Realization, tol: float | None = None) -> DecompositionReport:
    """Split ``-Q(z)^-1`` into an affine part plus a vanishing part.

    With G the gram product of the bounded realization, the first part is
    the degree-one matrix polynomial ``z G^-1 - G^-1 gamma0+ A gamma0 G^-1``
    (no finite poles; its negative index equals the negative inertia of G)
    and the second is realized on range(I - P) by the compressed operator,
    with gamma ``(I - P) A gamma0 G^-1``.  For minimal input the two
    indices add up to the index of Q.

    Raises
    ------
    GramProductSingular
    """
    t = resolve_tol(tol)
    ctx = build_context(r, t)
    gi = ctx.gram_product_inv
    const = -gi @ ctx.gamma_adj @ ctx.a @ ctx.gamma @ gi
    affine = RationalFunction([const, gi], [1.0])
    kappa1 = hermitian_inertia(ctx.gram_product, t).n_minus

    b = ctx.comp_basis
    space2 = PontryaginSpace(b.conj().T @ r.space.gram @ b, t)
    a2 = ctx.comp_op
    gamma_tilde = ctx.complement @ ctx.a @ ctx.gamma @ gi
    # Snap a gamma that cancels in exact arithmetic (decoupled models) to
    # exact zero, so the vanishing part gets index zero instead of noise.
    floor = 1e4 * np.finfo(float).eps * max(
        1.0,
        _la.spectral_norm(ctx.a) * _la.spectral_norm(ctx.gamma) * _la.spectral_norm(gi),
    )
    if _la.spectral_norm(gamma_tilde) <= floor:
        gamma_tilde = np.zeros_like(gamma_tilde)
    gamma2 = b.conj().T @ gamma_tilde
    from .relations import from_operator

    r2 = Realization(space2, from_operator(a2, space2, t), gamma2, BOUNDED, validate=False, tol=t)
    kappa2, method2 = _kappa_of(r2, t)
    tail = RealizationFunction(r2)

    kappa_whole, whole_method = _kappa_of(r, t)
    inverse = _ContextFunction(ctx, t)
    grid = verification_grid([inverse, tail])
    residual = _sum_residual(inverse, [affine, tail], grid)
    notes = []
    if not is_minimal(r, t):
        notes.append("input realization is not minimal; index accounting is reported, not guaranteed")
    if r2.dim and not is_minimal(r2, t):
        notes.append("vanishing part is not minimal")
    components = (
        ComponentRecord("affine", affine, None, kappa1, "exact"),
        ComponentRecord("vanishing", tail, r2, kappa2, method2),
    )
    kappa_sum = kappa1 + kappa2
    return DecompositionReport(
        components,
        kappa_sum,
        kappa_whole,
        whole_method,
        kappa_sum == kappa_whole,
        residual,
        grid,
        tuple(notes),
    )


class _ContextFunction(GNFunction):
    """The inverse function evaluated through a prebuilt projection split."""

    def __init__(self, ctx: InversionContext, tol: float | None = None):
        self.ctx = ctx
        self.out_dim = ctx.base.coeff_dim
        self._tol = tol

    def evaluate(self, z: complex) -> np.ndarray:
        return inverse_value(self.ctx, z, self._tol)


# ---------------------------------------------------------------------------
# probing sums for the converse question


@dataclass(frozen=True)
class SumProbeReport:
    """Decomposition facts of a realization built as a sum.

    Captures whether the components are minimal with indices adding up to
    the function index while the sum representation itself fails to be
    minimal (which can happen), and whether an injective stacked
    gamma-adjoint restores minimality.
    """

    component_minimal: tuple
    component_kappas: tuple
    sum_residual: float
    kappa_whole: int
    kappa_additive: bool
    stacked_gamma_adjoint_injective: bool
    sum_minimal: bool
    additive_but_not_minimal: bool
    implication_failures: tuple


def sum_decomposition_probe(r: Realization, tol: float | None = None) -> SumProbeReport:
    """Probe a realization built by :func:`sum_realizations`."""
    t = resolve_tol(tol)
    if r.summands is None:
        raise ValueError("probe requires a realization built as a sum (no summands recorded)")
    r1, r2 = r.summands
    comp_min = (is_minimal(r1, t), is_minimal(r2, t))
    k1, _ = _kappa_of(r1, t)
    k2, _ = _kappa_of(r2, t)
    kappa_whole, _ = _kappa_of(r, t)
    grid = verification_grid([r, r1, r2])
    residual = _sum_residual(r, [r1, r2], grid)
    stacked_inj = _la.svd_rank(r.gamma_adj, t) == r.dim
    sum_min = is_minimal(r, t)
    additive = k1 + k2 == kappa_whole
    failures = []
    if stacked_inj and not sum_min:
        failures.append("stacked_gamma_adjoint_injective => sum_minimal")
    if stacked_inj and not additive:
        failures.append("stacked_gamma_adjoint_injective => kappa_additive")
    return SumProbeReport(
        comp_min,
        (k1, k2),
        residual,
        kappa_whole,
        additive,
        stacked_inj,
        sum_min,
        additive and all(comp_min) and residual <= 1e-8 and not sum_min,
        tuple(failures),
    )
