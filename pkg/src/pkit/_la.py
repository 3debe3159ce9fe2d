"""Dense linear-algebra helpers shared across the package.

Rank, null-space and degeneracy decisions are all SVD based, with
tolerances relative to the largest singular value of the matrix at hand.
Everything operates on complex128 arrays.
"""

from __future__ import annotations

import numpy as np

from .config import resolve_tol
from .errors import DimensionMismatch


def as_cmatrix(m, name: str = "matrix") -> np.ndarray:
    """Coerce to a finite, 2-D complex array (1-D input becomes a column)."""
    a = np.asarray(m, dtype=complex)
    if a.ndim == 1:
        a = a.reshape(-1, 1)
    if a.ndim != 2:
        raise DimensionMismatch(f"{name} must be two-dimensional, got shape {a.shape}")
    if a.size and not np.all(np.isfinite(a)):
        raise ValueError(f"{name} contains non-finite entries")
    return a


def spectral_norm(a: np.ndarray) -> float:
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a, 2))


def herm_part(a: np.ndarray) -> np.ndarray:
    return 0.5 * (a + a.conj().T)


def is_hermitian(a: np.ndarray, tol: float | None = None) -> bool:
    t = resolve_tol(tol)
    if a.shape[0] != a.shape[1]:
        return False
    if a.size == 0:
        return True
    return spectral_norm(a - a.conj().T) <= t * max(1.0, spectral_norm(a))


def svd_rank(a: np.ndarray, tol: float | None = None) -> int:
    t = resolve_tol(tol)
    if a.size == 0:
        return 0
    s = np.linalg.svd(a, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > t * s[0]))


def range_basis(a: np.ndarray, tol: float | None = None) -> np.ndarray:
    """Orthonormal (Euclidean) basis of the column space."""
    t = resolve_tol(tol)
    a = np.asarray(a, dtype=complex)
    if a.size == 0:
        return np.zeros((a.shape[0], 0), dtype=complex)
    u, s, _ = np.linalg.svd(a, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return np.zeros((a.shape[0], 0), dtype=complex)
    r = int(np.count_nonzero(s > t * s[0]))
    return u[:, :r]


def null_basis(a: np.ndarray, tol: float | None = None) -> np.ndarray:
    """Orthonormal basis of the (right) null space of ``a``."""
    t = resolve_tol(tol)
    a = np.asarray(a, dtype=complex)
    rows, cols = a.shape
    if cols == 0:
        return np.zeros((0, 0), dtype=complex)
    if rows == 0 or not a.any():
        return np.eye(cols, dtype=complex)
    _, s, vh = np.linalg.svd(a, full_matrices=True)
    r = int(np.count_nonzero(s > t * s[0])) if s.size and s[0] > 0.0 else 0
    return vh[r:, :].conj().T


def projector(basis: np.ndarray) -> np.ndarray:
    """Euclidean orthogonal projector onto the span of orthonormal columns."""
    return basis @ basis.conj().T


def projector_range_basis(p: np.ndarray) -> np.ndarray:
    """Orthonormal basis of the range of an (oblique) idempotent.

    Every nonzero singular value of an exact idempotent is at least one,
    so the rank cut sits at 0.5; this stays correct when the computed
    idempotent is pure rounding noise (a numerically zero projector)."""
    if p.size == 0:
        return np.zeros((p.shape[0], 0), dtype=complex)
    u, s, _ = np.linalg.svd(p)
    r = int(np.count_nonzero(s > 0.5))
    return u[:, :r]


def projector_distance(basis_a: np.ndarray, basis_b: np.ndarray) -> float:
    """Spectral-norm distance between the Euclidean projectors of two spans."""
    if basis_a.shape[0] != basis_b.shape[0]:
        raise DimensionMismatch("subspaces live in different ambient dimensions")
    return spectral_norm(projector(basis_a) - projector(basis_b))


def solve_with_check(a: np.ndarray, b: np.ndarray, tol: float | None, exc: type[Exception], what: str) -> np.ndarray:
    """Solve ``a x = b`` rejecting matrices singular to relative tolerance."""
    t = resolve_tol(tol)
    if a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"{what} must be square, got shape {a.shape}")
    if a.size == 0:
        return np.zeros((0, b.shape[1] if b.ndim == 2 else 0), dtype=complex)
    s = np.linalg.svd(a, compute_uv=False)
    if s[0] == 0.0 or s[-1] <= t * s[0]:
        raise exc(f"{what} is singular to tolerance (smallest sv {s[-1]:.3e})")
    return np.linalg.solve(a, b)


def inv_with_check(a: np.ndarray, tol: float | None, exc: type[Exception], what: str) -> np.ndarray:
    if a.size == 0:
        return np.zeros_like(a)
    return solve_with_check(a, np.eye(a.shape[0], dtype=complex), tol, exc, what)


def smallest_largest_sv(a: np.ndarray) -> tuple[float, float]:
    if a.size == 0:
        return (np.inf, 0.0)
    s = np.linalg.svd(a, compute_uv=False)
    return (float(s[-1]), float(s[0]))
