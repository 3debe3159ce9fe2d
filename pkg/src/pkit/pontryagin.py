"""Indefinite-metric dense linear algebra.

A Pontryagin space here is C^n equipped with an invertible Hermitian Gram
matrix J; the inner product is ``[x, y] = y* J x`` and the negative index
of the space is the number of negative eigenvalues of J.  This module
provides inertia computation, metric adjoints, non-degeneracy tests and
J-orthogonal projections; everything downstream builds on it.

All objects are immutable values after construction and all operations are
pure functions, so they are safe to share between threads.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _la
from .config import resolve_tol
from .errors import DegenerateSubspace, DimensionMismatch, NotHermitian

__all__ = [
    "Inertia",
    "PontryaginSpace",
    "Subspace",
    "hermitian_inertia",
    "j_adjoint",
    "is_selfadjoint",
    "subspace_gram",
    "orthogonal_projection",
    "direct_sum",
    "signature_basis",
    "subspace_distance",
]


@dataclass(frozen=True)
class Inertia:
    """Eigenvalue sign counts (n_plus, n_zero, n_minus) of a Hermitian matrix."""

    n_plus: int
    n_zero: int
    n_minus: int

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.n_plus, self.n_zero, self.n_minus)


def hermitian_inertia(m, tol: float | None = None) -> Inertia:
    """Count eigenvalues of a Hermitian matrix below, near and above zero.

    Eigenvalues within ``tol * ||m||`` of zero count as zero; the input must
    be Hermitian to the same relative tolerance.

    Raises
    ------
    NotHermitian
        If ``m`` deviates from its conjugate transpose beyond tolerance.
    """
    a = _la.as_cmatrix(m, "inertia input")
    t = resolve_tol(tol)
    if a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"inertia input must be square, got {a.shape}")
    if not _la.is_hermitian(a, t):
        raise NotHermitian("inertia input is not Hermitian to tolerance")
    if a.size == 0:
        return Inertia(0, 0, 0)
    eigs = np.linalg.eigvalsh(_la.herm_part(a))
    scale = float(np.max(np.abs(eigs))) if eigs.size else 0.0
    thr = t * scale
    n_minus = int(np.count_nonzero(eigs < -thr))
    n_plus = int(np.count_nonzero(eigs > thr))
    return Inertia(n_plus, a.shape[0] - n_plus - n_minus, n_minus)


class PontryaginSpace:
    """C^n with an invertible Hermitian Gram matrix.

    Parameters
    ----------
    gram : array_like
        The Hermitian, invertible metric J.  Zero-dimensional spaces are
        legal and act as neutral elements under :func:`direct_sum`.
    tol : float, optional
        Relative tolerance for the Hermiticity and invertibility checks.
    """

    def __init__(self, gram, tol: float | None = None):
        t = resolve_tol(tol)
        j = _la.as_cmatrix(gram, "gram")
        if j.shape[0] != j.shape[1]:
            raise DimensionMismatch(f"gram must be square, got {j.shape}")
        if not _la.is_hermitian(j, t):
            raise NotHermitian("gram matrix is not Hermitian to tolerance")
        j = _la.herm_part(j)
        smallest, largest = _la.smallest_largest_sv(j)
        if j.size and smallest <= t * largest:
            raise DegenerateSubspace(
                f"gram matrix is singular to tolerance (smallest sv {smallest:.3e})"
            )
        self._gram = j
        self._gram.setflags(write=False)
        self._neg_index = hermitian_inertia(j, t).n_minus

    @property
    def gram(self) -> np.ndarray:
        return self._gram

    @property
    def dim(self) -> int:
        return self._gram.shape[0]

    @property
    def neg_index(self) -> int:
        """Number of negative eigenvalues of the Gram matrix."""
        return self._neg_index

    def __repr__(self) -> str:
        return f"PontryaginSpace(dim={self.dim}, neg_index={self.neg_index})"


class Subspace:
    """A subspace of a Pontryagin space, given by a spanning basis.

    The basis columns must be linearly independent to tolerance; they are
    not required to be orthonormal.  Use :meth:`from_span` to build a
    subspace from a redundant spanning set.
    """

    def __init__(self, ambient: PontryaginSpace, basis, tol: float | None = None):
        t = resolve_tol(tol)
        b = _la.as_cmatrix(basis, "basis")
        if b.shape[0] != ambient.dim:
            raise DimensionMismatch(
                f"basis rows {b.shape[0]} do not match ambient dimension {ambient.dim}"
            )
        if _la.svd_rank(b, t) != b.shape[1]:
            raise ValueError("basis columns are linearly dependent to tolerance")
        self.ambient = ambient
        self.basis = b
        self.basis.setflags(write=False)

    @classmethod
    def from_span(cls, ambient: PontryaginSpace, span, tol: float | None = None) -> "Subspace":
        """Build the subspace spanned by (possibly redundant) columns."""
        return cls(ambient, _la.range_basis(_la.as_cmatrix(span, "span"), tol), tol)

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    def __repr__(self) -> str:
        return f"Subspace(dim={self.dim}, ambient_dim={self.ambient.dim})"


def j_adjoint(t_mat, space: PontryaginSpace, kind: str = "operator", tol: float | None = None) -> np.ndarray:
    """Adjoint with respect to the Gram metric.

    ``kind`` selects the geometry of the input:

    * ``"operator"``: an endomorphism of the space; returns ``J^-1 T* J``.
    * ``"from_hilbert"``: a map from a Euclidean coefficient space into the
      space (a gamma); returns ``T* J``, a map back into the coefficient
      space.
    * ``"to_hilbert"``: a map from the space into a Euclidean coefficient
      space; returns ``J^-1 T*``.

    Applying the adjoint twice (with the matching kinds) returns the input.
    """
    a = _la.as_cmatrix(t_mat, "operator")
    j = space.gram
    n = space.dim
    if kind == "operator":
        if a.shape != (n, n):
            raise DimensionMismatch(f"endomorphism must be {n}x{n}, got {a.shape}")
        return np.linalg.solve(j, a.conj().T @ j) if n else a.copy()
    if kind == "from_hilbert":
        if a.shape[0] != n:
            raise DimensionMismatch(f"map into the space must have {n} rows, got {a.shape}")
        return a.conj().T @ j
    if kind == "to_hilbert":
        if a.shape[1] != n:
            raise DimensionMismatch(f"map out of the space must have {n} columns, got {a.shape}")
        return np.linalg.solve(j, a.conj().T) if n else a.conj().T
    raise ValueError(f"unknown adjoint kind {kind!r}")


def is_selfadjoint(t_mat, space: PontryaginSpace, tol: float | None = None) -> bool:
    """True iff ``J T`` is Hermitian to relative tolerance."""
    t = resolve_tol(tol)
    a = _la.as_cmatrix(t_mat, "operator")
    n = space.dim
    if a.shape != (n, n):
        raise DimensionMismatch(f"operator must be {n}x{n}, got {a.shape}")
    return _la.is_hermitian(space.gram @ a, t)


def subspace_gram(s: Subspace) -> np.ndarray:
    """Gram matrix ``B* J B`` of the subspace basis."""
    return s.basis.conj().T @ s.ambient.gram @ s.basis


def orthogonal_projection(s: Subspace, tol: float | None = None) -> np.ndarray:
    """Gram-orthogonal projection onto a non-degenerate subspace.

    Returns ``E = B (B* J B)^-1 B* J``; E is idempotent and symmetric in
    the metric (``J E`` Hermitian).

    Raises
    ------
    DegenerateSubspace
        If the subspace Gram matrix is singular to tolerance.
    """
    t = resolve_tol(tol)
    b = s.basis
    g = subspace_gram(s)
    g_inv = _la.inv_with_check(g, t, DegenerateSubspace, "subspace gram")
    if b.shape[1] == 0:
        return np.zeros((s.ambient.dim, s.ambient.dim), dtype=complex)
    return b @ g_inv @ b.conj().T @ s.ambient.gram


def direct_sum(sp1: PontryaginSpace, sp2: PontryaginSpace, tol: float | None = None) -> PontryaginSpace:
    """Orthogonal direct sum: block-diagonal Gram, additive negative index."""
    n1, n2 = sp1.dim, sp2.dim
    j = np.zeros((n1 + n2, n1 + n2), dtype=complex)
    j[:n1, :n1] = sp1.gram
    j[n1:, n1:] = sp2.gram
    return PontryaginSpace(j, tol)


def signature_basis(space: PontryaginSpace) -> tuple[np.ndarray, np.ndarray]:
    """Diagonalizing basis W with ``W* J W = diag(signs)``.

    Returns ``(W, signs)`` where signs are +/-1 ordered ascending in the
    eigenvalues of J (negative directions first).
    """
    if space.dim == 0:
        return np.zeros((0, 0), dtype=complex), np.zeros(0)
    eigs, u = np.linalg.eigh(space.gram)
    w = u / np.sqrt(np.abs(eigs))
    return w, np.sign(eigs)


def subspace_distance(s1: Subspace, s2: Subspace) -> float:
    """Spectral-norm distance between the Euclidean projectors of two subspaces."""
    b1 = _la.range_basis(s1.basis)
    b2 = _la.range_basis(s2.basis)
    return _la.projector_distance(b1, b2)
