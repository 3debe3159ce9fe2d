import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pkit import (
    DegenerateSubspace,
    NotHermitian,
    PontryaginSpace,
    Subspace,
    direct_sum,
    hermitian_inertia,
    is_selfadjoint,
    j_adjoint,
    orthogonal_projection,
    signature_basis,
    subspace_gram,
)

FLIP2 = np.array([[0.0, 1.0], [1.0, 0.0]])


class TestInertia:
    def test_diagonal_signature(self):
        assert hermitian_inertia(np.diag([1.0, -1.0])).as_tuple() == (1, 0, 1)

    def test_flip_matrix(self):
        assert hermitian_inertia(FLIP2).as_tuple() == (1, 0, 1)

    def test_block_gram(self, example1_j):
        assert hermitian_inertia(example1_j).as_tuple() == (3, 0, 1)

    def test_zero_matrix(self):
        assert hermitian_inertia(np.zeros((3, 3))).as_tuple() == (0, 3, 0)

    def test_rejects_non_hermitian(self):
        with pytest.raises(NotHermitian):
            hermitian_inertia(np.array([[0.0, 1.0], [0.0, 0.0]]))

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 10**6), st.integers(1, 8))
    def test_congruence_stability(self, seed, dim):
        # Inertia survives congruence by any invertible map (no zero
        # eigenvalues planted, so n_zero stays 0).
        rng = np.random.default_rng(seed)
        eigs = np.concatenate(
            [rng.uniform(0.5, 2.0, size=dim // 2), -rng.uniform(0.5, 2.0, size=dim - dim // 2)]
        )
        q, _ = np.linalg.qr(rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim)))
        m = q @ np.diag(eigs) @ q.conj().T
        s = np.eye(dim) + 0.3 * (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim)))
        if np.linalg.cond(s) > 1e3:
            s = np.eye(dim)
        assert hermitian_inertia(s.conj().T @ m @ s).as_tuple() == hermitian_inertia(m).as_tuple()


class TestJAdjoint:
    def test_gamma_adjoint_of_block_model(self, example1_j):
        space = PontryaginSpace(example1_j)
        gamma = np.array([[1.0, 0.0], [0.0, 1.0], [0.0, 1.0], [1.0, 0.0]])
        expected = np.array([[1.0, 0.0, 1.0, 0.0], [0.0, 1.0, 0.0, 1.0]])
        assert np.allclose(j_adjoint(gamma, space, kind="from_hilbert"), expected)

    def test_identity_both_readings(self):
        space = PontryaginSpace(FLIP2)
        assert np.allclose(j_adjoint(np.eye(2), space, kind="from_hilbert"), FLIP2)
        assert np.allclose(j_adjoint(np.eye(2), space), np.eye(2))

    def test_euclidean_case_is_conjugate_transpose(self):
        rng = np.random.default_rng(7)
        space = PontryaginSpace(np.eye(3))
        t = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        assert np.allclose(j_adjoint(t, space), t.conj().T)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 10**6), st.integers(1, 6))
    def test_involution(self, seed, dim):
        rng = np.random.default_rng(seed)
        eigs = np.where(rng.standard_normal(dim) > 0, 1.0, -1.0) * rng.uniform(0.5, 2.0, dim)
        q, _ = np.linalg.qr(rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim)))
        space = PontryaginSpace(q @ np.diag(eigs) @ q.conj().T)
        t = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        assert np.allclose(j_adjoint(j_adjoint(t, space), space), t)
        gamma = rng.standard_normal((dim, 2)) + 1j * rng.standard_normal((dim, 2))
        back = j_adjoint(j_adjoint(gamma, space, kind="from_hilbert"), space, kind="to_hilbert")
        assert np.allclose(back, gamma)


class TestSelfAdjoint:
    def test_block_model_operator(self, example1_j):
        space = PontryaginSpace(example1_j)
        a = np.zeros((4, 4))
        a[2, 3] = 1.0
        assert is_selfadjoint(a, space)

    def test_nilpotent_with_flip_gram(self):
        space = PontryaginSpace(FLIP2)
        assert is_selfadjoint(np.array([[0.0, 1.0], [0.0, 0.0]]), space)

    def test_nilpotent_with_euclidean_gram(self):
        space = PontryaginSpace(np.eye(2))
        assert not is_selfadjoint(np.array([[0.0, 1.0], [0.0, 0.0]]), space)


class TestSubspaces:
    def test_neutral_direction_in_flip_gram(self):
        space = PontryaginSpace(FLIP2)
        s = Subspace(space, np.array([[1.0], [0.0]]))
        assert np.allclose(subspace_gram(s), np.zeros((1, 1)))

    def test_full_space_gram_is_j(self):
        space = PontryaginSpace(FLIP2)
        s = Subspace(space, np.eye(2))
        assert np.allclose(subspace_gram(s), FLIP2)

    def test_neutral_diagonal_direction(self):
        space = PontryaginSpace(np.diag([1.0, -1.0]))
        s = Subspace(space, np.array([[1.0], [1.0]]))
        assert np.allclose(subspace_gram(s), np.zeros((1, 1)))

    def test_projection_full_space(self):
        space = PontryaginSpace(FLIP2)
        assert np.allclose(orthogonal_projection(Subspace(space, np.eye(2))), np.eye(2))

    def test_projection_compatible_direction(self):
        space = PontryaginSpace(np.diag([1.0, -1.0]))
        e = orthogonal_projection(Subspace(space, np.array([[1.0], [0.0]])))
        assert np.allclose(e, np.diag([1.0, 0.0]))

    def test_projection_rejects_neutral_span(self):
        space = PontryaginSpace(FLIP2)
        with pytest.raises(DegenerateSubspace):
            orthogonal_projection(Subspace(space, np.array([[1.0], [0.0]])))

    def test_projection_invariants_random(self):
        rng = np.random.default_rng(42)
        for _ in range(30):
            dim = int(rng.integers(2, 7))
            eigs = np.where(rng.standard_normal(dim) > 0, 1.0, -1.0)
            q, _ = np.linalg.qr(rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim)))
            j = q @ np.diag(eigs) @ q.conj().T
            space = PontryaginSpace(j)
            k = int(rng.integers(1, dim + 1))
            basis = rng.standard_normal((dim, k)) + 1j * rng.standard_normal((dim, k))
            s = Subspace(space, basis)
            try:
                e = orthogonal_projection(s)
            except DegenerateSubspace:
                continue
            assert np.linalg.norm(e @ e - e, 2) <= 1e-8
            assert np.linalg.norm(j @ e - e.conj().T @ j, 2) <= 1e-8
            # range check: E fixes the basis
            assert np.linalg.norm(e @ basis - basis, 2) <= 1e-8 * np.linalg.norm(basis, 2)


class TestDirectSum:
    def test_block_model_space(self, example1_j):
        total = direct_sum(PontryaginSpace(np.eye(2)), PontryaginSpace(FLIP2))
        assert np.allclose(total.gram, example1_j)
        assert total.neg_index == 1

    def test_zero_dim_is_neutral(self):
        space = PontryaginSpace(np.diag([1.0, -1.0]))
        total = direct_sum(space, PontryaginSpace(np.zeros((0, 0))))
        assert total.dim == 2
        assert np.allclose(total.gram, space.gram)

    def test_negative_index_additivity(self):
        rng = np.random.default_rng(3)
        for _ in range(25):
            d1, d2 = int(rng.integers(0, 4)), int(rng.integers(0, 4))
            spaces = []
            for d in (d1, d2):
                if d == 0:
                    spaces.append(PontryaginSpace(np.zeros((0, 0))))
                    continue
                eigs = np.where(rng.standard_normal(d) > 0, 1.0, -1.0)
                q, _ = np.linalg.qr(rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d)))
                spaces.append(PontryaginSpace(q @ np.diag(eigs) @ q.conj().T))
            total = direct_sum(spaces[0], spaces[1])
            assert total.neg_index == spaces[0].neg_index + spaces[1].neg_index


class TestSpaceValidation:
    def test_rejects_singular_gram(self):
        with pytest.raises(DegenerateSubspace):
            PontryaginSpace(np.diag([1.0, 0.0]))

    def test_rejects_non_hermitian_gram(self):
        with pytest.raises(NotHermitian):
            PontryaginSpace(np.array([[1.0, 1.0], [0.0, 1.0]]))

    def test_signature_basis(self, example1_j):
        space = PontryaginSpace(example1_j)
        w, signs = signature_basis(space)
        assert np.allclose(w.conj().T @ space.gram @ w, np.diag(signs))
        assert sorted(signs) == [-1.0, 1.0, 1.0, 1.0]

    def test_zero_dimensional_space(self):
        space = PontryaginSpace(np.zeros((0, 0)))
        assert space.dim == 0 and space.neg_index == 0
