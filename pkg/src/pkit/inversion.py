"""Inversion of bounded-form functions through a metric projection split.

For ``Q(z) = gamma0+ (A - z)^-1 gamma0`` with ``G := gamma0+ gamma0``
invertible, the projection ``P := gamma0 G^-1 gamma0+`` is orthogonal in
the Gram metric and splits the state space into ``(I - P)K [+] P K``.
With ``At := (I - P) A (I - P)`` the inverse satisfies

    -Q(z)^-1 = G^-1 gamma0+ { A Y(z) A - (A - z) } gamma0 G^-1,

where ``Y(z)`` is the resolvent of At on range(I - P), re-embedded into
the full space.  The same split yields a Schur-complement route back to
Q(z), a one-sided product formula for ``-Q(z)^-1 gamma0+``, and a
relation-valued realization of the inverse whose multivalued part is the
range of gamma0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _la
from .config import resolve_tol
from .errors import (
    GramProductSingular,
    NotInResolventSet,
    PkitError,
    SchurSingular,
    SingularValue,
)
from .nevanlinna import (
    BOUNDED,
    GENERAL,
    Realization,
    _realization_value,
    evaluate,
    gamma_at,
    to_general,
)
from .pontryagin import Subspace
from .relations import LinearRelation, multivalued_part, resolvent

__all__ = [
    "InversionContext",
    "build_context",
    "complement_resolvent",
    "inverse_value",
    "schur_value",
    "inverse_gamma_adjoint",
    "inverse_realization",
    "MultivaluedReport",
    "verify_multivalued_part",
    "resolvent_difference_residual",
]


@dataclass(frozen=True)
class InversionContext:
    """Prebuilt projection split of a bounded realization.

    Attributes
    ----------
    base : Realization
        The bounded realization being inverted.
    gram_product, gram_product_inv : ndarray
        ``G = gamma0+ gamma0`` and its inverse.
    projection : ndarray
        ``P = gamma0 G^-1 gamma0+``; metric-orthogonal projection onto
        range(gamma0).
    complement : ndarray
        ``I - P``.
    compressed_op : ndarray
        ``At = (I - P) A (I - P)`` on the full space.
    comp_basis : ndarray
        Euclidean-orthonormal basis of range(I - P).
    comp_op : ndarray
        At restricted to range(I - P) in that basis.
    """

    base: Realization
    gram_product: np.ndarray
    gram_product_inv: np.ndarray
    projection: np.ndarray
    complement: np.ndarray
    compressed_op: np.ndarray
    comp_basis: np.ndarray
    comp_op: np.ndarray

    @property
    def a(self) -> np.ndarray:
        return self.base.a_matrix

    @property
    def gamma(self) -> np.ndarray:
        return self.base.gamma

    @property
    def gamma_adj(self) -> np.ndarray:
        return self.base.gamma_adj


def build_context(r: Realization, tol: float | None = None) -> InversionContext:
    """Build the projection split for a bounded realization.

    Raises
    ------
    GramProductSingular
        If ``gamma0+ gamma0`` is singular to tolerance (the exception
        carries the smallest singular value).
    """
    t = resolve_tol(tol)
    if r.form != BOUNDED:
        raise ValueError("inversion context requires a bounded-form realization")
    g = r.gamma_adj @ r.gamma
    smallest, largest = _la.smallest_largest_sv(g)
    if g.size and smallest <= t * largest:
        raise GramProductSingular(
            f"gamma0+ gamma0 is singular to tolerance (smallest sv {smallest:.3e})",
            smallest_sv=smallest,
        )
    if g.size == 0:
        g_inv = np.zeros_like(g)
    else:
        g_inv = np.linalg.inv(g)
    n = r.dim
    eye = np.eye(n, dtype=complex)
    p = r.gamma @ g_inv @ r.gamma_adj
    q = eye - p
    a = r.a_matrix
    atilde = q @ a @ q
    comp_basis = _la.projector_range_basis(q)
    comp_op = comp_basis.conj().T @ atilde @ comp_basis
    ctx = InversionContext(r, g, g_inv, p, q, atilde, comp_basis, comp_op)
    _check_context(ctx, t)
    return ctx


def _check_context(ctx: InversionContext, t: float) -> None:
    p = ctx.projection
    j = ctx.base.space.gram
    scale = max(1.0, _la.spectral_norm(p))
    checks = (
        ("P idempotent", _la.spectral_norm(p @ p - p)),
        ("P metric-symmetric", _la.spectral_norm(j @ p - p.conj().T @ j) / max(1.0, _la.spectral_norm(j))),
        ("P fixes gamma", _la.spectral_norm(p @ ctx.gamma - ctx.gamma)),
        ("gamma-adjoint fixes P", _la.spectral_norm(ctx.gamma_adj @ p - ctx.gamma_adj)),
    )
    for label, resid in checks:
        if resid > 1e-6 * scale:
            raise PkitError(f"projection split failed sanity check '{label}' ({resid:.3e})")


def complement_resolvent(ctx: InversionContext, z: complex, tol: float | None = None) -> np.ndarray:
    """Resolvent of the compressed operator on range(I - P), re-embedded.

    The returned matrix Y satisfies ``Y = (I-P) Y (I-P)`` and inverts
    ``At - z`` on range(I - P).
    """
    t = resolve_tol(tol)
    b = ctx.comp_basis
    p_dim = b.shape[1]
    if p_dim == 0:
        n = ctx.base.dim
        return np.zeros((n, n), dtype=complex)
    shifted = ctx.comp_op - z * np.eye(p_dim, dtype=complex)
    inv = _la.inv_with_check(
        shifted, t, NotInResolventSet, f"compressed operator at z = {z}"
    )
    return b @ inv @ b.conj().T @ ctx.complement


def inverse_value(ctx: InversionContext, z: complex, tol: float | None = None) -> np.ndarray:
    """Value of ``-Q(z)^-1`` through the projection-split formula."""
    z = complex(z)
    y = complement_resolvent(ctx, z, tol)
    a = ctx.a
    core = a @ y @ a - (a - z * np.eye(ctx.base.dim, dtype=complex))
    return ctx.gram_product_inv @ ctx.gamma_adj @ core @ ctx.gamma @ ctx.gram_product_inv


def schur_value(ctx: InversionContext, z: complex, tol: float | None = None) -> np.ndarray:
    """Value of Q(z) through the inner Schur complement on range(P).

    Cross-validation route: must agree with direct evaluation wherever
    both are defined.

    Raises
    ------
    SchurSingular
        If the Schur complement restricted to range(P) is singular.
    """
    t = resolve_tol(tol)
    z = complex(z)
    y = complement_resolvent(ctx, z, t)
    a = ctx.a
    p = ctx.projection
    n = ctx.base.dim
    inner = p @ (a - z * np.eye(n, dtype=complex)) @ p - p @ a @ y @ a @ p
    c = _la.range_basis(p, t)
    restricted = c.conj().T @ inner @ c
    inv = _la.inv_with_check(restricted, t, SchurSingular, f"Schur complement at z = {z}")
    w = c @ inv @ c.conj().T
    return ctx.gamma_adj @ w @ ctx.gamma


def inverse_gamma_adjoint(ctx: InversionContext, z: complex, tol: float | None = None) -> np.ndarray:
    """One-sided product ``(-Q(z)^-1) gamma0+`` without forming the inverse.

    Uses ``G^-1 gamma0+ { -I + A Y(z) } (A - z)``.
    """
    z = complex(z)
    y = complement_resolvent(ctx, z, tol)
    a = ctx.a
    n = ctx.base.dim
    eye = np.eye(n, dtype=complex)
    return ctx.gram_product_inv @ ctx.gamma_adj @ (-eye + a @ y) @ (a - z * eye)


# ---------------------------------------------------------------------------
# relation-valued realization of the inverse


def _snap_cancellation(diff: np.ndarray, *terms: np.ndarray) -> np.ndarray:
    """Zero the rounding residue of a difference that cancels exactly.

    Singular values of ``diff`` below the rounding floor of the terms that
    produced it are dropped, so directions (or the whole matrix) that
    cancel in exact arithmetic come out exactly zero and downstream kernel
    computations see crisp ranks."""
    if diff.size == 0:
        return diff
    scale = max([1.0] + [_la.spectral_norm(term) for term in terms])
    floor = 1e4 * np.finfo(float).eps * scale
    u, s, vh = np.linalg.svd(diff)
    keep = s > floor
    if keep.all():
        return diff
    return (u[:, keep] * s[keep]) @ vh[keep, :]


def inverse_realization(r: Realization, z0: complex, tol: float | None = None) -> Realization:
    """General-form realization of ``-Q(z)^-1`` with a relation-valued op.

    The representing relation is reconstructed from its resolvent at z0,

        T := (A - z0)^-1 - gamma_z0 Q(z0)^-1 gamma_conj(z0)+,

    as the relation ``{(T y, y + z0 T y)}``; its multivalued part is the
    range of gamma (encoding a critical eigenvalue at infinity).  The new
    gamma map is ``-gamma_z0 Q(z0)^-1``.

    Raises
    ------
    SingularValue
        If Q(z0) is singular to tolerance.
    """
    t = resolve_tol(tol)
    z0 = complex(z0)
    if z0.imag <= 0:
        raise ValueError("z0 must lie in the upper half plane")
    gen = r if r.form == GENERAL else to_general(r, z0, t)
    if gen.ref_point != z0:
        gen = to_general(gen, z0, t)
    q0 = _realization_value(gen, z0, t)
    q0_inv = _la.inv_with_check(q0, t, SingularValue, f"Q(z0) at z0 = {z0}")
    gamma = gen.gamma  # resolvent orbit at z0 equals the general-form gamma
    gamma_conj_adj = gamma_at(gen, np.conj(z0), t).conj().T @ gen.space.gram
    raw = resolvent(gen.op, z0, t)
    correction = gamma @ q0_inv @ gamma_conj_adj
    t_matrix = _snap_cancellation(raw - correction, raw, correction)
    n = gen.dim
    relation = LinearRelation(
        gen.space, t_matrix, np.eye(n, dtype=complex) + z0 * t_matrix, t
    )
    gamma_hat = -gamma @ q0_inv
    # constant of the inverse: (-Q(z0)^-1)* = -Q(conj(z0))^-1
    ref_value_adj = -np.linalg.inv(q0.conj().T)
    return Realization(
        gen.space, relation, gamma_hat, GENERAL, z0, ref_value_adj, validate=True, tol=t
    )


@dataclass(frozen=True)
class MultivaluedReport:
    """Comparison of the inverse relation's multivalued part with range(gamma0)."""

    multivalued_dim: int
    gamma_rank: int
    distance: float
    kernel_distance: float
    ok: bool


def verify_multivalued_part(r: Realization, z0: complex = 1j, tol: float | None = None) -> MultivaluedReport:
    """Check multivalued part of the inverse relation against range(gamma0).

    Also checks the kernel claim: the resolvent of the inverse relation at
    z0 annihilates exactly the range of gamma0.
    """
    t = resolve_tol(tol)
    rhat = inverse_realization(r, z0, t)
    mset = multivalued_part(rhat.op, t)
    gamma_range = _la.range_basis(r.gamma, t)
    dist = _la.projector_distance(_la.range_basis(mset.basis, t), gamma_range)
    t_matrix = resolvent(rhat.op, z0, t)
    kernel_dist = _la.projector_distance(_la.null_basis(t_matrix, max(t, 1e-10)), gamma_range)
    ok = dist <= 1e-8 and kernel_dist <= 1e-8 and mset.dim == gamma_range.shape[1]
    return MultivaluedReport(mset.dim, gamma_range.shape[1], dist, kernel_dist, ok)


def resolvent_difference_residual(r: Realization, rhat: Realization, z: complex, tol: float | None = None) -> float:
    """Residual of the resolvent-difference identity at z.

    For the inverse realization built at z0 the difference of resolvents
    must equal ``-gamma_z Q(z)^-1 gamma_conj(z)+`` wherever both sides are
    defined.
    """
    t = resolve_tol(tol)
    z = complex(z)
    gen = r if r.form == GENERAL else to_general(r, rhat.ref_point, t)
    q_z = _realization_value(gen, z, t)
    q_inv = _la.inv_with_check(q_z, t, SingularValue, f"Q at z = {z}")
    gz = gamma_at(gen, z, t)
    gz_conj_adj = gamma_at(gen, np.conj(z), t).conj().T @ gen.space.gram
    lhs = resolvent(rhat.op, z, t) - resolvent(gen.op, z, t)
    rhs = -gz @ q_inv @ gz_conj_adj
    return _la.spectral_norm(lhs - rhs)
