"""Realizations of generalized Nevanlinna functions and their negative index.

A realization is a triplet (K, A, gamma) with A a self-adjoint linear
relation in a Pontryagin space K and gamma a map from a Euclidean
coefficient space H = C^m into K.  Two forms are supported:

* bounded form: ``Q(z) = gamma+ (A - z)^-1 gamma`` with A the graph of a
  bounded operator;
* general form, anchored at a reference point z0 in the upper half plane:
  ``Q(z) = Q(z0)* + (z - conj(z0)) gamma+ (I + (z - z0)(A - z)^-1) gamma``.

The negative index kappa of the represented function is computed two ways:
exactly, as the negative inertia of the Gram matrix restricted to the
minimal subspace, and by sampling Nevanlinna-kernel matrices, which yields
a stabilizing lower bound.  The two agree whenever the exact reduction
succeeds.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _la
from .config import resolve_tol
from .errors import (
    DegenerateMinimalSubspace,
    DimensionMismatch,
    NotInResolventSet,
    PkitError,
    SingularValue,
)
from .pontryagin import (
    PontryaginSpace,
    Subspace,
    hermitian_inertia,
    subspace_gram,
)
from .relations import (
    LinearRelation,
    from_operator,
    is_selfadjoint_relation,
    operator_matrix,
    resolvent,
)

__all__ = [
    "BOUNDED",
    "GENERAL",
    "Realization",
    "bounded_realization",
    "general_realization",
    "GNFunction",
    "RealizationFunction",
    "SumFunction",
    "BlockDiagFunction",
    "InverseFunction",
    "RationalFunction",
    "as_function",
    "evaluate",
    "gamma_at",
    "kernel",
    "SamplerConfig",
    "KappaEstimate",
    "negative_squares_sampled",
    "minimal_subspace",
    "is_minimal",
    "exact_negative_index",
    "SymmetryReport",
    "check_symmetry",
    "PredicateReport",
    "realization_predicates",
    "to_general",
    "to_bounded",
    "reanchor",
]

BOUNDED = "bounded"
GENERAL = "general"


class Realization:
    """State-space representation of a generalized Nevanlinna function.

    Parameters
    ----------
    space : PontryaginSpace
        The state space K.
    op : LinearRelation
        Self-adjoint relation A in K.  For the bounded form this must be
        the graph of an operator.
    gamma : array_like
        Map C^m -> K (dim x m).
    form : str
        ``"bounded"`` or ``"general"``.
    ref_point : complex, optional
        Reference point z0 for the general form; must lie in the open
        upper half plane and in the resolvent set of ``op``.
    ref_value_adj : array_like, optional
        The anchoring constant Q(z0)* for the general form.
    summands : tuple, optional
        When built as a sum of realizations, the summands are kept so the
        sum representation can be probed afterwards.
    validate : bool
        Skip the (cubic-cost) self-adjointness and consistency checks when
        False; intended for tests probing invalid inputs.
    """

    def __init__(
        self,
        space: PontryaginSpace,
        op: LinearRelation,
        gamma,
        form: str = BOUNDED,
        ref_point: complex | None = None,
        ref_value_adj=None,
        *,
        summands: tuple | None = None,
        validate: bool = True,
        tol: float | None = None,
    ):
        t = resolve_tol(tol)
        if form not in (BOUNDED, GENERAL):
            raise ValueError(f"unknown realization form {form!r}")
        g = _la.as_cmatrix(gamma, "gamma")
        if g.shape[0] != space.dim:
            raise DimensionMismatch(
                f"gamma must have {space.dim} rows, got {g.shape[0]}"
            )
        if op.space.dim != space.dim:
            raise DimensionMismatch("relation lives in a space of different dimension")
        self.space = space
        self.op = op
        self.gamma = g
        self.gamma.setflags(write=False)
        self.form = form
        self.summands = summands
        self._a_matrix: np.ndarray | None = None

        if form == BOUNDED:
            if ref_point is not None or ref_value_adj is not None:
                raise ValueError("bounded form takes no reference point or constant")
            self.ref_point = None
            self.ref_value_adj = None
            self._a_matrix = operator_matrix(op, t)
        else:
            if ref_point is None or ref_value_adj is None:
                raise ValueError("general form needs ref_point and ref_value_adj")
            z0 = complex(ref_point)
            if z0.imag <= 0:
                raise ValueError(f"reference point must lie in the upper half plane, got {z0}")
            c = _la.as_cmatrix(ref_value_adj, "ref_value_adj")
            m = g.shape[1]
            if c.shape != (m, m):
                raise DimensionMismatch(f"ref_value_adj must be {m}x{m}, got {c.shape}")
            self.ref_point = z0
            self.ref_value_adj = c
            self.ref_value_adj.setflags(write=False)
            resolvent(op, z0, t)  # raises NotInResolventSet when z0 is bad

        if validate:
            if not is_selfadjoint_relation(op, max(t, 1e2 * t)):
                raise ValueError("relation is not self-adjoint in the Gram metric")
            if form == GENERAL:
                skew = self.ref_value_adj - self.ref_value_adj.conj().T
                expect = (np.conj(self.ref_point) - self.ref_point) * (
                    self.gamma_adj @ self.gamma
                )
                scale = max(1.0, _la.spectral_norm(expect))
                if _la.spectral_norm(skew - expect) > 1e-7 * scale:
                    raise ValueError(
                        "ref_value_adj is inconsistent with gamma (wrong skew part)"
                    )

    @property
    def dim(self) -> int:
        return self.space.dim

    @property
    def coeff_dim(self) -> int:
        """Dimension m of the Euclidean coefficient space."""
        return self.gamma.shape[1]

    @property
    def gamma_adj(self) -> np.ndarray:
        """Metric adjoint ``gamma* J`` of the gamma map."""
        return self.gamma.conj().T @ self.space.gram

    @property
    def a_matrix(self) -> np.ndarray:
        """Operator matrix of the relation (bounded form only)."""
        if self._a_matrix is None:
            self._a_matrix = operator_matrix(self.op)
        return self._a_matrix

    def __repr__(self) -> str:
        return (
            f"Realization(form={self.form!r}, dim={self.dim}, "
            f"coeff_dim={self.coeff_dim}, neg_index={self.space.neg_index})"
        )


def bounded_realization(space: PontryaginSpace, a_matrix, gamma, *, validate: bool = True, tol: float | None = None) -> Realization:
    """Bounded-form realization from an operator matrix."""
    return Realization(space, from_operator(a_matrix, space, tol), gamma, BOUNDED, validate=validate, tol=tol)


def general_realization(space, op, gamma, ref_point, ref_value_adj, *, validate: bool = True, tol: float | None = None) -> Realization:
    return Realization(space, op, gamma, GENERAL, ref_point, ref_value_adj, validate=validate, tol=tol)


# ---------------------------------------------------------------------------
# evaluation


def evaluate(f, z: complex, tol: float | None = None) -> np.ndarray:
    """Value of a function or realization at z (an m x m complex matrix)."""
    if isinstance(f, Realization):
        return _realization_value(f, complex(z), tol)
    return as_function(f).evaluate(complex(z))


def _realization_value(r: Realization, z: complex, tol: float | None = None) -> np.ndarray:
    rz = resolvent(r.op, z, tol)
    if r.form == BOUNDED:
        return r.gamma_adj @ rz @ r.gamma
    z0 = r.ref_point
    gz = r.gamma + (z - z0) * (rz @ r.gamma)
    return r.ref_value_adj + (z - np.conj(z0)) * (r.gamma_adj @ gz)


def gamma_at(r: Realization, z: complex, tol: float | None = None) -> np.ndarray:
    """The resolvent orbit ``(I + (z - z0)(A - z)^-1) gamma`` of a general form."""
    if r.form != GENERAL:
        raise ValueError("gamma_at is defined for general-form realizations")
    rz = resolvent(r.op, z, tol)
    return r.gamma + (z - r.ref_point) * (rz @ r.gamma)


# ---------------------------------------------------------------------------
# function objects


class GNFunction:
    """Evaluable matrix-valued function on a complex domain."""

    out_dim: int

    def evaluate(self, z: complex) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, z: complex) -> np.ndarray:
        return self.evaluate(complex(z))


class RealizationFunction(GNFunction):
    """Function backed by a realization."""

    def __init__(self, realization: Realization, tol: float | None = None):
        self.realization = realization
        self.out_dim = realization.coeff_dim
        self._tol = tol

    def evaluate(self, z: complex) -> np.ndarray:
        return _realization_value(self.realization, complex(z), self._tol)


class SumFunction(GNFunction):
    """Pointwise sum of functions with a common output dimension."""

    def __init__(self, parts):
        parts = tuple(as_function(p) for p in parts)
        if not parts:
            raise ValueError("sum needs at least one part")
        dims = {p.out_dim for p in parts}
        if len(dims) != 1:
            raise DimensionMismatch(f"summands disagree on output dimension: {sorted(dims)}")
        self.parts = parts
        self.out_dim = parts[0].out_dim

    def evaluate(self, z: complex) -> np.ndarray:
        out = np.zeros((self.out_dim, self.out_dim), dtype=complex)
        for p in self.parts:
            out = out + p.evaluate(z)
        return out


class BlockDiagFunction(GNFunction):
    """Block-diagonal composition; output dimensions add."""

    def __init__(self, parts):
        self.parts = tuple(as_function(p) for p in parts)
        self.out_dim = sum(p.out_dim for p in self.parts)

    def evaluate(self, z: complex) -> np.ndarray:
        out = np.zeros((self.out_dim, self.out_dim), dtype=complex)
        pos = 0
        for p in self.parts:
            d = p.out_dim
            out[pos : pos + d, pos : pos + d] = p.evaluate(z)
            pos += d
        return out


class InverseFunction(GNFunction):
    """The class-preserving inverse ``-Q(z)^-1`` of a function Q."""

    def __init__(self, inner, tol: float | None = None):
        self.inner = as_function(inner)
        self.out_dim = self.inner.out_dim
        self._tol = tol

    def evaluate(self, z: complex) -> np.ndarray:
        value = self.inner.evaluate(z)
        return -_la.inv_with_check(
            value, self._tol, SingularValue, f"function value at z = {z}"
        )


class RationalFunction(GNFunction):
    """Matrix polynomial over a scalar polynomial: ``P(z) / q(z)``.

    ``numerator`` is a list of m x m coefficient matrices (ascending powers)
    and ``denominator`` a list of scalars (ascending powers).
    """

    def __init__(self, numerator, denominator=(1.0,)):
        self.num = tuple(_la.as_cmatrix(c, "numerator coefficient") for c in numerator)
        if not self.num:
            raise ValueError("numerator needs at least one coefficient")
        shape = self.num[0].shape
        if shape[0] != shape[1] or any(c.shape != shape for c in self.num):
            raise DimensionMismatch("numerator coefficients must be square and equal-shaped")
        self.den = tuple(complex(c) for c in denominator)
        if not any(self.den):
            raise ValueError("denominator is identically zero")
        self.out_dim = shape[0]

    def evaluate(self, z: complex) -> np.ndarray:
        num = np.zeros_like(self.num[0])
        for c in reversed(self.num):
            num = num * z + c
        den = 0.0 + 0.0j
        for c in reversed(self.den):
            den = den * z + c
        scale = max(abs(c) for c in self.den)
        if abs(den) <= 1e-14 * max(1.0, scale) * max(1.0, abs(z)) ** (len(self.den) - 1):
            raise SingularValue(f"rational function has a pole at z = {z}")
        return num / den


def as_function(f) -> GNFunction:
    """Wrap a realization (or pass through a function) as a GNFunction."""
    if isinstance(f, GNFunction):
        return f
    if isinstance(f, Realization):
        return RealizationFunction(f)
    raise TypeError(f"cannot interpret {type(f).__name__} as an evaluable function")


# ---------------------------------------------------------------------------
# kernel and negative squares


def kernel(f, z: complex, w: complex, tol: float | None = None) -> np.ndarray:
    """Nevanlinna kernel ``(Q(z) - Q(w)*) / (z - conj(w))``.

    At coincident conjugate points (z equal to conj(w), which forces a 0/0
    limit) the derivative Q'(z) is returned, computed by a central finite
    difference with step ``1e-6 * max(1, |z|)``.
    """
    z = complex(z)
    w = complex(w)
    func = as_function(f)
    denom = z - np.conj(w)
    if abs(denom) <= 1e-12 * max(1.0, abs(z)):
        h = 1e-6 * max(1.0, abs(z))
        return (func.evaluate(z + h) - func.evaluate(z - h)) / (2.0 * h)
    return (func.evaluate(z) - func.evaluate(w).conj().T) / denom


@dataclass(frozen=True)
class SamplerConfig:
    """Sampling plan for the negative-squares estimator.

    Points are drawn uniformly from the rectangle ``real_range x
    imag_range`` of the upper half plane, directions from the standard
    complex Gaussian; ``trials`` independent sample matrices are assembled
    and the maximum of their negative inertias is reported.  The seed fixes
    the whole procedure.
    """

    points: int = 32
    trials: int = 8
    seed: int = 0x9E3779B9
    real_range: tuple[float, float] = (-3.0, 3.0)
    imag_range: tuple[float, float] = (0.1, 3.0)
    max_retries: int = 100


@dataclass(frozen=True)
class KappaEstimate:
    """Negative-index estimate with its provenance.

    ``method`` is ``"exact"`` (negative inertia of the Gram matrix
    restricted to the minimal subspace) or ``"sampled"`` (stabilized lower
    bound from kernel sample matrices).
    """

    value: int
    method: str
    samples: int = 0
    witness_points: tuple = field(default_factory=tuple)


def negative_squares_sampled(f, cfg: SamplerConfig | None = None, tol: float | None = None) -> KappaEstimate:
    """Sampled negative-squares count of the Nevanlinna kernel of f.

    Deterministic for a fixed seed: per-trial random streams are spawned
    from the seed, so the result does not depend on evaluation order.
    """
    func = as_function(f)
    cfg = cfg or SamplerConfig()
    t = resolve_tol(tol)
    m = func.out_dim
    best = 0
    best_points: tuple = ()
    for stream in np.random.SeedSequence(cfg.seed).spawn(cfg.trials):
        rng = np.random.default_rng(stream)
        zs: list[complex] = []
        values: list[np.ndarray] = []
        hs: list[np.ndarray] = []
        attempts = 0
        while len(zs) < cfg.points:
            attempts += 1
            if attempts > cfg.points * cfg.max_retries:
                raise PkitError("sampler could not find evaluable points")
            z = complex(rng.uniform(*cfg.real_range), rng.uniform(*cfg.imag_range))
            h = rng.standard_normal(m) + 1j * rng.standard_normal(m)
            try:
                value = func.evaluate(z)
            except (NotInResolventSet, SingularValue):
                continue
            zs.append(z)
            values.append(value)
            hs.append(h)
        # G[i, j] = h_j* N(z_i, z_j) h_i, assembled from u_i = Q(z_i) h_i:
        # the numerator is h_j* u_i - (u_j)* h_i.
        h_mat = np.column_stack(hs)
        u_mat = np.column_stack([values[i] @ hs[i] for i in range(cfg.points)])
        cross = h_mat.conj().T @ u_mat  # cross[j, i] = h_j* u_i
        z_arr = np.array(zs)
        denom = z_arr[:, None] - np.conj(z_arr)[None, :]
        g = (cross.T - cross.conj()) / denom
        g = _la.herm_part(g)
        eigs = np.linalg.eigvalsh(g) if g.size else np.zeros(0)
        scale = float(np.max(np.abs(eigs))) if eigs.size else 0.0
        neg = int(np.count_nonzero(eigs < -t * scale))
        if neg > best:
            best = neg
            best_points = tuple(zs)
    return KappaEstimate(best, "sampled", cfg.points * cfg.trials, best_points)


# ---------------------------------------------------------------------------
# minimality and the exact negative index


def _resolvent_sample_points(r: Realization, count: int, tol: float | None = None) -> list[complex]:
    base = r.ref_point if r.form == GENERAL else 1.37j
    points: list[complex] = []
    k = 0
    while len(points) < count and k < 50 * (count + 1):
        z = base + (0.23 * k - 0.11) + 1j * (0.31 + 0.17 * k)
        k += 1
        try:
            resolvent(r.op, z, tol)
        except NotInResolventSet:
            continue
        points.append(z)
    if len(points) < count:
        raise PkitError("could not find enough resolvent-set sample points")
    return points


def minimal_subspace(r: Realization, tol: float | None = None) -> Subspace:
    """Smallest subspace supporting the function.

    Bounded form: the Krylov span of gamma under the operator.  General
    form: the span of the resolvent orbits of gamma at dim+1 sample points.
    """
    t = resolve_tol(tol)
    n = r.dim
    if n == 0:
        return Subspace(r.space, np.zeros((0, 0), dtype=complex), t)
    if r.form == BOUNDED:
        blocks = [r.gamma]
        for _ in range(n - 1):
            blocks.append(r.a_matrix @ blocks[-1])
        stacked = np.hstack(blocks)
    else:
        stacked = np.hstack(
            [gamma_at(r, z, t) for z in _resolvent_sample_points(r, n + 1, t)]
        )
    return Subspace(r.space, _la.range_basis(stacked, t), t)


def is_minimal(r: Realization, tol: float | None = None) -> bool:
    """True iff the minimal subspace is the whole state space."""
    return minimal_subspace(r, tol).dim == r.dim


def exact_negative_index(r: Realization, tol: float | None = None) -> KappaEstimate:
    """Negative index of the represented function by minimal reduction.

    Restricts the Gram matrix to the minimal subspace and counts its
    negative eigenvalues; valid whether or not the ambient realization is
    minimal.

    Raises
    ------
    DegenerateMinimalSubspace
        If the restricted Gram matrix is singular to tolerance; fall back
        to :func:`negative_squares_sampled`.
    """
    t = resolve_tol(tol)
    sub = minimal_subspace(r, t)
    g = subspace_gram(sub)
    smallest, largest = _la.smallest_largest_sv(g)
    if g.size and smallest <= t * largest:
        raise DegenerateMinimalSubspace(
            f"minimal-subspace Gram is singular to tolerance (smallest sv {smallest:.3e})"
        )
    return KappaEstimate(hermitian_inertia(g, t).n_minus, "exact")


# ---------------------------------------------------------------------------
# symmetry and structural predicates


@dataclass(frozen=True)
class SymmetryReport:
    max_residual: float
    points: tuple
    residuals: tuple


def check_symmetry(f, points, tol: float | None = None) -> SymmetryReport:
    """Residuals of ``Q(conj(z))* = Q(z)`` over the given points."""
    func = as_function(f)
    residuals = []
    for z in points:
        z = complex(z)
        residuals.append(
            _la.spectral_norm(func.evaluate(np.conj(z)).conj().T - func.evaluate(z))
        )
    return SymmetryReport(max(residuals) if residuals else 0.0, tuple(points), tuple(residuals))


@dataclass(frozen=True)
class PredicateReport:
    """Injectivity/minimality predicates of a realization.

    ``separating`` is the value-separation property: ``(f, Q(z) h) = 0``
    for all z and h forces f = 0.  For the bounded form it is decided by
    the observability rank of the stacked moment matrices
    ``gamma+ A^k gamma``; for the general form it is not defined here and
    reported as None.  ``implication_failures`` lists any of the expected
    one-way implications between these predicates that fail on this
    instance; it is empty on sound inputs.
    """

    gamma_injective: bool
    gamma_adjoint_injective: bool
    gram_product_injective: bool
    minimal: bool
    separating: bool | None
    implication_failures: tuple


def realization_predicates(r: Realization, tol: float | None = None) -> PredicateReport:
    t = resolve_tol(tol)
    n, m = r.dim, r.coeff_dim
    gamma = r.gamma
    gamma_adj = r.gamma_adj
    gamma_injective = _la.svd_rank(gamma, t) == m
    gamma_adjoint_injective = _la.svd_rank(gamma_adj, t) == n
    gram_product_injective = _la.svd_rank(gamma_adj @ gamma, t) == m
    minimal = is_minimal(r, t)

    separating: bool | None = None
    if r.form == BOUNDED:
        moments = []
        block = gamma
        for _ in range(max(n, 1)):
            moments.append(gamma_adj @ block)
            block = r.a_matrix @ block
        separating = _la.svd_rank(np.vstack(moments), t) == m

    failures = []
    if gamma_adjoint_injective and not minimal:
        failures.append("gamma_adjoint_injective => minimal")
    if separating is not None:
        if gram_product_injective and not separating:
            failures.append("gram_product_injective => separating")
        if separating and not gamma_injective:
            failures.append("separating => gamma_injective")
        if minimal and gamma_injective and not separating:
            failures.append("minimal and gamma_injective => separating")
    return PredicateReport(
        gamma_injective,
        gamma_adjoint_injective,
        gram_product_injective,
        minimal,
        separating,
        tuple(failures),
    )


# ---------------------------------------------------------------------------
# form conversions


def to_general(r: Realization, z0: complex, tol: float | None = None) -> Realization:
    """Re-express a realization in general form anchored at z0.

    For a bounded form the new gamma is ``(A - z0)^-1 gamma`` and the
    constant is Q(z0)*; a general form is re-anchored via its resolvent
    orbit at z0.  The represented function is unchanged.
    """
    t = resolve_tol(tol)
    z0 = complex(z0)
    if z0.imag <= 0:
        raise ValueError("anchor point must lie in the upper half plane")
    value_adj = _realization_value(r, z0, t).conj().T
    if r.form == BOUNDED:
        new_gamma = resolvent(r.op, z0, t) @ r.gamma
    else:
        new_gamma = gamma_at(r, z0, t)
    return Realization(
        r.space, r.op, new_gamma, GENERAL, z0, value_adj,
        summands=r.summands, validate=False, tol=t,
    )


def reanchor(r: Realization, z0: complex, tol: float | None = None) -> Realization:
    """Move the reference point of a general-form realization."""
    if r.form != GENERAL:
        raise ValueError("reanchor applies to general-form realizations")
    return to_general(r, z0, tol)


def to_bounded(r: Realization, tol: float | None = None) -> tuple[Realization, np.ndarray]:
    """Bounded form plus a Hermitian constant offset.

    Requires the relation to be an operator graph.  Returns ``(b, d)``
    with ``Q(z) = d + gamma0+ (A - z)^-1 gamma0`` where
    ``gamma0 = (A - z0) gamma``; d vanishes exactly when the function
    already admits the bounded form.
    """
    t = resolve_tol(tol)
    if r.form == BOUNDED:
        return r, np.zeros((r.coeff_dim, r.coeff_dim), dtype=complex)
    a = operator_matrix(r.op, t)
    z0 = r.ref_point
    gamma0 = (a - z0 * np.eye(r.dim)) @ r.gamma
    offset = r.ref_value_adj - r.gamma_adj @ ((a - z0 * np.eye(r.dim)) @ r.gamma)
    bounded = Realization(r.space, r.op, gamma0, BOUNDED, validate=False, tol=t)
    return bounded, offset
