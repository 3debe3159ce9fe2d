"""Root manifolds and Jordan chains of metric-self-adjoint operators.

A Jordan chain at a real eigenvalue alpha is a tuple x_0, ..., x_{l-1}
with ``(A - alpha) x_0 = 0`` and ``(A - alpha) x_k = x_{k-1}``; it is
non-degenerate when the Gram matrix of its span is invertible.  The module
finds maximal non-degenerate chains, regenerates them from the gamma map,
peels a state space into metric-orthogonal chain blocks (positive
eigenvectors first, then chains, then a remainder), and builds the pole
cancellation function whose decay rate at alpha certifies the chain
length.

Jordan structure is computed by staircase kernels of powers of
``A - alpha`` with SVD rank decisions, never by a general Jordan-form
routine.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _la
from .config import resolve_tol
from .errors import (
    NoGenerator,
    NotEigenvalue,
    NotMinimal,
    SingularValue,
)
from .nevanlinna import (
    BOUNDED,
    GNFunction,
    Realization,
    RealizationFunction,
    evaluate,
    is_minimal,
)
from .pontryagin import (
    PontryaginSpace,
    Subspace,
    hermitian_inertia,
    orthogonal_projection,
    subspace_gram,
)
from .relations import from_operator

__all__ = [
    "JordanChain",
    "root_manifold",
    "maximal_nondegenerate_chain",
    "chain_generator_in_range",
    "AlphaBlock",
    "AlphaDecomposition",
    "alpha_decomposition",
    "PoleCancellation",
    "pole_cancellation",
    "cancellation_exponent",
]


@dataclass(frozen=True)
class JordanChain:
    """Jordan chain x_0, ..., x_{l-1} at a real eigenvalue."""

    alpha: float
    vectors: tuple

    @property
    def length(self) -> int:
        return len(self.vectors)

    def matrix(self) -> np.ndarray:
        """Chain vectors as columns, eigenvector first."""
        return np.column_stack(self.vectors)


def _chain_residual(a: np.ndarray, alpha: float, vectors) -> float:
    shifted = a - alpha * np.eye(a.shape[0])
    worst = _la.spectral_norm((shifted @ vectors[0].reshape(-1, 1)))
    for k in range(1, len(vectors)):
        worst = max(
            worst,
            float(np.linalg.norm(shifted @ vectors[k] - vectors[k - 1])),
        )
    return worst


def _kernel_ladder(a: np.ndarray, alpha: float, t: float) -> list[np.ndarray]:
    """Bases of ker (A-alpha)^k for k = 1, 2, ... until the dimension stops
    growing.  Each step solves a projected kernel problem instead of
    forming high matrix powers."""
    n = a.shape[0]
    shifted = a - alpha * np.eye(n, dtype=complex)
    scale = max(1.0, _la.spectral_norm(shifted))
    ladder: list[np.ndarray] = []
    current = _la.null_basis(shifted / scale, t)
    while current.shape[1] > (ladder[-1].shape[1] if ladder else -1):
        ladder.append(current)
        proj = np.eye(n, dtype=complex) - _la.projector(current)
        current = _la.null_basis((proj @ shifted) / scale, t)
        if current.shape[1] == ladder[-1].shape[1]:
            break
    return ladder


def root_manifold(r: Realization, alpha: float, tol: float | None = None) -> Subspace:
    """Generalized eigenspace of the operator at alpha (possibly zero-dim)."""
    t = resolve_tol(tol)
    if r.form != BOUNDED:
        raise ValueError("root manifolds require a bounded-form realization")
    ladder = _kernel_ladder(r.a_matrix, float(alpha), t)
    basis = ladder[-1] if ladder and ladder[0].shape[1] else np.zeros((r.dim, 0), dtype=complex)
    return Subspace(r.space, basis, t)


def _max_chain_matrices(
    a: np.ndarray,
    j: np.ndarray,
    alpha: float,
    t: float,
    attempts: int = 96,
    seed: int = 0x5DEECE66,
) -> np.ndarray | None:
    """Chain matrix (columns x_0 ... x_{l-1}) of a longest non-degenerate
    chain at alpha, or None when every candidate span is degenerate.

    Candidate chain tops are drawn deterministically; ties are broken by
    the largest Gram determinant after normalizing the top vector, which
    favors numerically robust blocks.
    """
    n = a.shape[0]
    ladder = _kernel_ladder(a, alpha, t)
    if not ladder or ladder[0].shape[1] == 0:
        return None
    shifted = a - alpha * np.eye(n, dtype=complex)
    rng = np.random.default_rng(seed + 1_000_003 * n)
    for level in range(len(ladder), 0, -1):
        v = ladder[level - 1]
        below = ladder[level - 2] if level >= 2 else np.zeros((n, 0), dtype=complex)
        proj_below = _la.projector(below)
        best_det = -1.0
        best: np.ndarray | None = None
        candidates = [v[:, k] for k in range(v.shape[1])]
        for _ in range(attempts):
            c = rng.standard_normal(v.shape[1]) + 1j * rng.standard_normal(v.shape[1])
            candidates.append(v @ c)
        for top in candidates:
            nrm = float(np.linalg.norm(top))
            if nrm == 0.0:
                continue
            top = top / nrm
            # genuine depth: the top must stick out of the previous kernel
            if float(np.linalg.norm(top - proj_below @ top)) < 1e-6:
                continue
            cols = [top]
            for _ in range(level - 1):
                cols.append(shifted @ cols[-1])
            cols.reverse()
            chain = np.column_stack(cols)
            gram = chain.conj().T @ j @ chain
            smallest, largest = _la.smallest_largest_sv(gram)
            if largest == 0.0 or smallest <= t * largest:
                continue
            det = abs(np.linalg.det(gram))
            # relative margin so earlier (canonical) candidates win ties
            if det > best_det * (1.0 + 1e-9):
                best_det = det
                best = chain
        if best is not None:
            return best
    return None


def maximal_nondegenerate_chain(r: Realization, alpha: float, tol: float | None = None) -> JordanChain | None:
    """A longest Jordan chain at alpha whose span has invertible Gram.

    Returns None when every maximal chain is degenerate (possible only for
    defective inputs; a genuinely self-adjoint operator always has one).

    Raises
    ------
    NotEigenvalue
        If alpha is not an eigenvalue of the operator.
    """
    t = resolve_tol(tol)
    if r.form != BOUNDED:
        raise ValueError("chains require a bounded-form realization")
    alpha = float(alpha)
    a = r.a_matrix
    ladder = _kernel_ladder(a, alpha, t)
    if not ladder or ladder[0].shape[1] == 0:
        raise NotEigenvalue(f"alpha = {alpha} is not an eigenvalue")
    chain = _max_chain_matrices(a, r.space.gram, alpha, t)
    if chain is None:
        return None
    return JordanChain(alpha, tuple(chain[:, k] for k in range(chain.shape[1])))


def chain_generator_in_range(r: Realization, chain: JordanChain, tol: float | None = None) -> np.ndarray:
    """Coefficient vector h regenerating the chain from the gamma map.

    With E the metric projection onto the chain span and gamma1 = E gamma,
    the returned h makes ``(A - alpha)^(l-1) gamma1 h`` a nonzero multiple
    of the chain eigenvector, and the chain regrown from top
    ``gamma1 h`` spans the same subspace.  When the given chain top itself
    lies in the range of gamma1, h reproduces it exactly.

    Raises
    ------
    NoGenerator
        If no candidate regenerates the chain span; on valid inputs this
        flags numerical trouble rather than a structural obstruction.
    """
    t = resolve_tol(tol)
    a = r.a_matrix
    alpha = chain.alpha
    n = r.dim
    span = Subspace.from_span(r.space, chain.matrix(), t)
    e = orthogonal_projection(span, t)
    gamma1 = e @ r.gamma
    shifted = a - alpha * np.eye(n, dtype=complex)
    power = np.linalg.matrix_power(shifted, chain.length - 1)
    reach = power @ gamma1
    chain_basis = _la.range_basis(chain.matrix(), t)

    def regrows(h: np.ndarray) -> bool:
        top = gamma1 @ h
        if float(np.linalg.norm(power @ top)) <= 1e3 * t * max(1.0, float(np.linalg.norm(top))):
            return False
        cols = [top]
        for _ in range(chain.length - 1):
            cols.append(shifted @ cols[-1])
        regen = np.column_stack(list(reversed(cols)))
        if _la.svd_rank(regen, t) != chain.length:
            return False
        return _la.projector_distance(_la.range_basis(regen, t), chain_basis) <= 1e-8

    # Preferred: reproduce the given top exactly when it lies in range(gamma1).
    top_given = chain.vectors[-1]
    h_exact, *_ = np.linalg.lstsq(gamma1, top_given, rcond=None)
    if float(np.linalg.norm(gamma1 @ h_exact - top_given)) <= 1e-8 * max(
        1.0, float(np.linalg.norm(top_given))
    ) and regrows(h_exact):
        return h_exact
    # Otherwise pick the direction the chain-length power of A sees best.
    if reach.size:
        _, s, vh = np.linalg.svd(reach)
        if s.size and s[0] > 0:
            h = vh[0].conj()
            if regrows(h):
                return h
    rng = np.random.default_rng(0xC0FFEE)
    for _ in range(64):
        h = rng.standard_normal(r.coeff_dim) + 1j * rng.standard_normal(r.coeff_dim)
        if regrows(h):
            return h
    raise NoGenerator("no coefficient vector regenerates the chain span")


# ---------------------------------------------------------------------------
# blockwise decomposition at an eigenvalue


@dataclass(frozen=True)
class AlphaBlock:
    """One metric-orthogonal block of an eigenvalue decomposition.

    ``kind`` is "positive" (span of positive eigenvectors), "chain" (span
    of one non-degenerate Jordan chain, carried in ``chain``), or
    "remainder" (everything left; any chains at alpha inside it are
    degenerate)."""

    kind: str
    subspace: Subspace
    kappa: int
    projection: np.ndarray
    realization: Realization
    function: GNFunction
    chain: JordanChain | None = None


@dataclass(frozen=True)
class AlphaDecomposition:
    alpha: float
    blocks: tuple
    kappa_total: int
    residual: float
    grid: tuple

    @property
    def chain_blocks(self) -> tuple:
        return tuple(b for b in self.blocks if b.kind == "chain")


def _component_realization(r: Realization, basis: np.ndarray, proj: np.ndarray, t: float) -> Realization:
    space = PontryaginSpace(basis.conj().T @ r.space.gram @ basis, t)
    a_sub = basis.conj().T @ r.a_matrix @ basis
    gamma_sub = basis.conj().T @ (proj @ r.gamma)
    return Realization(space, from_operator(a_sub, space, t), gamma_sub, BOUNDED, validate=False, tol=t)


def alpha_decomposition(r: Realization, alpha: float, tol: float | None = None) -> AlphaDecomposition:
    """Peel the state space into blocks at a real eigenvalue.

    First the span of positive eigenvectors at alpha is removed, then
    maximal non-degenerate chains are extracted greedily (longest first)
    until none remain; what is left is the remainder block.  Blocks are
    mutually orthogonal in the metric, their indices add up to the ambient
    negative index, and the compressed component functions sum to the whole
    pointwise.  The positive and remainder blocks are always reported, even
    when zero-dimensional.

    Raises
    ------
    NotMinimal, NotEigenvalue
    """
    t = resolve_tol(tol)
    if r.form != BOUNDED:
        raise ValueError("eigenvalue decomposition requires a bounded-form realization")
    if not is_minimal(r, t):
        raise NotMinimal("eigenvalue decomposition requires a minimal realization")
    alpha = float(alpha)
    a = r.a_matrix
    j = r.space.gram
    n = r.dim
    eig_basis = _kernel_ladder(a, alpha, t)
    if not eig_basis or eig_basis[0].shape[1] == 0:
        raise NotEigenvalue(f"alpha = {alpha} is not an eigenvalue")

    collected: list[tuple[str, np.ndarray, JordanChain | None]] = []

    # positive eigenvectors first
    v = eig_basis[0]
    gram_eig = v.conj().T @ j @ v
    eigs, u = np.linalg.eigh(_la.herm_part(gram_eig))
    scale = float(np.max(np.abs(eigs))) if eigs.size else 0.0
    pos = u[:, eigs > t * scale] if eigs.size else u[:, :0]
    pos_basis = _la.range_basis(v @ pos, t)
    collected.append(("positive", pos_basis, None))

    # working embedding: metric-orthogonal complement of what was removed
    emb = _la.null_basis(pos_basis.conj().T @ j, t) if pos_basis.shape[1] else np.eye(n, dtype=complex)

    while emb.shape[1]:
        a_cur = emb.conj().T @ a @ emb
        j_cur = emb.conj().T @ j @ emb
        chain_cur = _max_chain_matrices(a_cur, j_cur, alpha, t)
        if chain_cur is None:
            break
        chain_full = emb @ chain_cur
        chain = JordanChain(alpha, tuple(chain_full[:, k] for k in range(chain_full.shape[1])))
        collected.append(("chain", _la.range_basis(chain_full, t), chain))
        comp_cur = _la.null_basis(chain_cur.conj().T @ j_cur, t)
        emb = emb @ comp_cur

    collected.append(("remainder", emb if emb.shape[1] else np.zeros((n, 0), dtype=complex), None))

    blocks = []
    for kind, basis, chain in collected:
        sub = Subspace(r.space, basis, t)
        if basis.shape[1]:
            proj = orthogonal_projection(sub, t)
            kappa = hermitian_inertia(subspace_gram(sub), t).n_minus
        else:
            proj = np.zeros((n, n), dtype=complex)
            kappa = 0
        comp = _component_realization(r, basis, proj, t)
        blocks.append(
            AlphaBlock(kind, sub, kappa, proj, comp, RealizationFunction(comp), chain)
        )

    from .decomposition import _sum_residual, verification_grid

    grid = verification_grid([r] + [b.realization for b in blocks if b.subspace.dim])
    residual = _sum_residual(r, [b.function for b in blocks if b.subspace.dim], grid)
    return AlphaDecomposition(alpha, tuple(blocks), sum(b.kappa for b in blocks), residual, grid)


# ---------------------------------------------------------------------------
# pole cancellation


class PoleCancellation(GNFunction):
    """Vector function ``Q(z)^-1 gamma0+ sum_k (z - alpha)^k x_k``.

    Evaluates to an m-vector; when the chain top equals ``gamma0 h`` the
    value is exactly ``-(z - alpha)^l h``, so the decay rate at alpha
    certifies the chain length l.

    Evaluation deliberately approaches the pole, where both ``A - z`` and
    Q(z) become ill conditioned on purpose, so the rank gates here run at a
    machine-level threshold and reject only genuine singularity.
    """

    _EVAL_TOL = 5e-16

    def __init__(self, realization: Realization, chain: JordanChain):
        if realization.form != BOUNDED:
            raise ValueError("pole cancellation requires a bounded-form realization")
        self.realization = realization
        self.chain = chain
        self.out_dim = realization.coeff_dim

    def evaluate(self, z: complex) -> np.ndarray:
        z = complex(z)
        combo = np.zeros(self.realization.dim, dtype=complex)
        for k, x in enumerate(self.chain.vectors):
            combo = combo + (z - self.chain.alpha) ** k * x
        rhs = self.realization.gamma_adj @ combo
        q = evaluate(self.realization, z, self._EVAL_TOL)
        return _la.solve_with_check(
            q, rhs.reshape(-1, 1), self._EVAL_TOL, SingularValue, f"Q at z = {z}"
        ).ravel()


def pole_cancellation(r: Realization, chain: JordanChain, tol: float | None = None) -> PoleCancellation:
    """Pole cancellation function of a chain; see :class:`PoleCancellation`."""
    t = resolve_tol(tol)
    resid = _chain_residual(r.a_matrix, chain.alpha, [np.asarray(v) for v in chain.vectors])
    scale = max(1.0, _la.spectral_norm(r.a_matrix)) * max(
        1.0, max(float(np.linalg.norm(v)) for v in chain.vectors)
    )
    if resid > 1e3 * t * scale:
        raise ValueError(f"chain relations do not hold to tolerance (residual {resid:.3e})")
    return PoleCancellation(r, chain)


def cancellation_exponent(eta: PoleCancellation, ks=(1, 2, 3, 4, 5)) -> float:
    """Least-squares slope of log ||eta|| against log |z - alpha| on the
    ladder ``z = alpha + 10^-k``; estimates the chain length."""
    alpha = eta.chain.alpha
    xs = []
    ys = []
    for k in ks:
        step = 10.0 ** (-k)
        value = eta.evaluate(alpha + step)
        xs.append(np.log10(step))
        ys.append(np.log10(float(np.linalg.norm(value))))
    slope = np.polyfit(xs, ys, 1)[0]
    return float(slope)
