"""Linear relations (multivalued operators) in a Pontryagin space.

A relation is a subspace of K (+) K stored by a pair of generator matrices
(M, N) with equal column counts: it consists of all pairs ``(M c, N c)``.
Operator graphs embed via ``(I, T)``; a nonzero multivalued part encodes an
eigenvalue at infinity.  Relations are compared as subspaces (by Euclidean
projectors onto the column space of the stacked generators), never by their
generator matrices.
"""

from __future__ import annotations

import numpy as np

from . import _la
from .config import resolve_tol
from .errors import DimensionMismatch, NotInResolventSet
from .pontryagin import PontryaginSpace, Subspace, direct_sum

__all__ = [
    "LinearRelation",
    "from_operator",
    "adjoint_relation",
    "is_selfadjoint_relation",
    "multivalued_part",
    "resolvent",
    "relation_direct_sum",
    "relations_equal",
    "operator_matrix",
]


class LinearRelation:
    """Subspace of K (+) K spanned by the pairs ``(M c, N c)``.

    The stacked generator matrix ``[M; N]`` must have full column rank to
    tolerance; use :meth:`from_span` to clean up a redundant spanning set.
    """

    def __init__(self, space: PontryaginSpace, domain_gens, range_gens, tol: float | None = None):
        t = resolve_tol(tol)
        m = _la.as_cmatrix(domain_gens, "domain generators")
        n = _la.as_cmatrix(range_gens, "range generators")
        if m.shape[0] != space.dim or n.shape[0] != space.dim:
            raise DimensionMismatch(
                f"generator rows ({m.shape[0]}, {n.shape[0]}) do not match space dimension {space.dim}"
            )
        if m.shape[1] != n.shape[1]:
            raise DimensionMismatch("domain and range generators need equal column counts")
        stacked = np.vstack([m, n])
        if _la.svd_rank(stacked, t) != stacked.shape[1]:
            raise ValueError("redundant generators: stacked [M; N] is column-rank deficient")
        self.space = space
        self.domain_gens = m
        self.range_gens = n
        self.domain_gens.setflags(write=False)
        self.range_gens.setflags(write=False)

    @classmethod
    def from_span(cls, space: PontryaginSpace, stacked, tol: float | None = None) -> "LinearRelation":
        """Build a relation from a (possibly redundant) stacked spanning set."""
        s = _la.as_cmatrix(stacked, "stacked generators")
        if s.shape[0] != 2 * space.dim:
            raise DimensionMismatch(
                f"stacked generators must have {2 * space.dim} rows, got {s.shape[0]}"
            )
        basis = _la.range_basis(s, tol)
        n = space.dim
        return cls(space, basis[:n, :], basis[n:, :], tol)

    @property
    def n_generators(self) -> int:
        return self.domain_gens.shape[1]

    @property
    def stacked(self) -> np.ndarray:
        return np.vstack([self.domain_gens, self.range_gens])

    def __repr__(self) -> str:
        return f"LinearRelation(dim={self.space.dim}, generators={self.n_generators})"


def from_operator(t_mat, space: PontryaginSpace, tol: float | None = None) -> LinearRelation:
    """Graph ``{(c, T c)}`` of a (square) operator matrix."""
    a = _la.as_cmatrix(t_mat, "operator")
    if a.shape != (space.dim, space.dim):
        raise DimensionMismatch(f"operator must be {space.dim}x{space.dim}, got {a.shape}")
    return LinearRelation(space, np.eye(space.dim, dtype=complex), a, tol)


def adjoint_relation(rel: LinearRelation, tol: float | None = None) -> LinearRelation:
    """Metric adjoint: all (x, y) with ``[y, u] = [x, v]`` for every (u, v) in rel.

    Computed as the null space of ``[-N* J, M* J]`` acting on stacked (x, y).
    """
    j = rel.space.gram
    n = rel.space.dim
    block = np.hstack([-rel.range_gens.conj().T @ j, rel.domain_gens.conj().T @ j])
    basis = _la.null_basis(block, tol)
    return LinearRelation(rel.space, basis[:n, :], basis[n:, :], tol)


def relations_equal(rel1: LinearRelation, rel2: LinearRelation, tol: float | None = None) -> bool:
    """Subspace equality of two relations on the same space."""
    t = resolve_tol(tol)
    if rel1.space.dim != rel2.space.dim:
        return False
    b1 = _la.range_basis(rel1.stacked, t)
    b2 = _la.range_basis(rel2.stacked, t)
    if b1.shape[1] != b2.shape[1]:
        return False
    return _la.projector_distance(b1, b2) <= max(t, 1e3 * t)


def is_selfadjoint_relation(rel: LinearRelation, tol: float | None = None) -> bool:
    """True iff the relation equals its metric adjoint as a subspace."""
    return relations_equal(rel, adjoint_relation(rel, tol), tol)


def multivalued_part(rel: LinearRelation, tol: float | None = None) -> Subspace:
    """The subspace ``{h : (0, h) in rel}``; zero-dimensional for graphs."""
    coeffs = _la.null_basis(rel.domain_gens, tol)
    vectors = rel.range_gens @ coeffs
    return Subspace(rel.space, _la.range_basis(vectors, tol), tol)


def resolvent(rel: LinearRelation, z: complex, tol: float | None = None) -> np.ndarray:
    """Everywhere-defined inverse ``(rel - z)^-1`` as a matrix.

    The point z is in the resolvent set iff the map ``c -> N c - z M c`` is
    onto the whole space and the induced value map is single valued; both
    conditions are decided by rank tests at tolerance.

    Raises
    ------
    NotInResolventSet
        If z is an eigenvalue or the relation is not surjective at z.
    """
    t = resolve_tol(tol)
    n = rel.space.dim
    if n == 0:
        return np.zeros((0, 0), dtype=complex)
    d = rel.range_gens - z * rel.domain_gens
    u, s, vh = np.linalg.svd(d, full_matrices=False)
    rank = int(np.count_nonzero(s > t * s[0])) if s.size and s[0] > 0.0 else 0
    if rank < n:
        raise NotInResolventSet(f"z = {z} is not in the resolvent set (rank {rank} < {n})")
    pinv = vh.conj().T[:, :rank] @ np.diag(1.0 / s[:rank]) @ u.conj().T[:, :rank]
    out = rel.domain_gens @ pinv
    # Single-valuedness: the least-squares map must reproduce M.  The
    # rounding floor of the residual grows with cond(D), while genuine
    # multivaluedness produces an O(1) relative residual, so the threshold
    # tracks the conditioning.
    resid = _la.spectral_norm(out @ d - rel.domain_gens)
    cond = s[0] / s[rank - 1]
    thr = max(100.0 * t, 1e3 * np.finfo(float).eps * cond)
    if resid > thr * max(1.0, _la.spectral_norm(rel.domain_gens)):
        raise NotInResolventSet(
            f"relation is multivalued over z = {z} (consistency residual {resid:.3e})"
        )
    return out


def relation_direct_sum(rel1: LinearRelation, rel2: LinearRelation, tol: float | None = None) -> LinearRelation:
    """Block relation on the direct sum space; preserves self-adjointness."""
    space = direct_sum(rel1.space, rel2.space, tol)
    n1, n2 = rel1.space.dim, rel2.space.dim
    k1, k2 = rel1.n_generators, rel2.n_generators
    m = np.zeros((n1 + n2, k1 + k2), dtype=complex)
    n = np.zeros((n1 + n2, k1 + k2), dtype=complex)
    m[:n1, :k1] = rel1.domain_gens
    m[n1:, k1:] = rel2.domain_gens
    n[:n1, :k1] = rel1.range_gens
    n[n1:, k1:] = rel2.range_gens
    return LinearRelation(space, m, n, tol)


def operator_matrix(rel: LinearRelation, tol: float | None = None) -> np.ndarray:
    """Matrix T with graph(T) = rel; fails if the relation is not a graph."""
    t = resolve_tol(tol)
    n = rel.space.dim
    m = rel.domain_gens
    if m.shape[1] != n or _la.svd_rank(m, t) != n:
        raise ValueError("relation is not the graph of an everywhere-defined operator")
    if n == 0:
        return np.zeros((0, 0), dtype=complex)
    return np.linalg.solve(m.conj().T, rel.range_gens.conj().T).conj().T
