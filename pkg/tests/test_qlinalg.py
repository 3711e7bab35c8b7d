import numpy as np
import pytest

from crenaudit import (
    Bipartition,
    DensityOperator,
    DimensionProfile,
    DomainError,
    PureState,
    ou_state,
    partial_trace,
    partial_transpose,
    schmidt,
    spectral_decomposition,
    tensor_product,
    trace_norm,
)
from crenaudit.states import maximally_entangled

from conftest import rand_dm, rand_pure


def ket(profile, digits):
    vec = np.zeros(profile.size, dtype=complex)
    vec[profile.index_of(digits)] = 1.0
    return PureState(profile, vec)


class TestProfilesAndStates:
    def test_index_order_party_one_slowest(self):
        profile = DimensionProfile((2, 3))
        assert profile.index_of((0, 0)) == 0
        assert profile.index_of((0, 2)) == 2
        assert profile.index_of((1, 0)) == 3

    def test_profile_rejects_dimension_one(self):
        with pytest.raises(DomainError):
            DimensionProfile((2, 1))

    def test_pure_state_renormalizes_small_deviation(self):
        profile = DimensionProfile((2,))
        psi = PureState(profile, np.array([1.0 + 5e-9, 0.0]))
        assert abs(np.linalg.norm(psi.amplitudes) - 1.0) < 1e-12

    def test_pure_state_rejects_large_deviation(self):
        with pytest.raises(DomainError):
            PureState(DimensionProfile((2,)), np.array([1.1, 0.0]))

    def test_density_rejects_non_hermitian(self):
        mat = np.array([[0.5, 0.1], [0.0, 0.5]], dtype=complex)
        with pytest.raises(DomainError):
            DensityOperator(DimensionProfile((2,)), mat)

    def test_density_rejects_negative_eigenvalue(self):
        mat = np.diag([1.5, -0.5]).astype(complex)
        with pytest.raises(DomainError):
            DensityOperator(DimensionProfile((2,)), mat)

    def test_bipartition_must_be_proper(self):
        with pytest.raises(DomainError):
            Bipartition((1, 2), 2)
        with pytest.raises(DomainError):
            Bipartition((), 2)
        assert Bipartition((2,), 3).side_b == (1, 3)

    def test_cut_coercion(self):
        from crenaudit import as_bipartition

        assert as_bipartition(2, 3).side_a == (2,)
        assert as_bipartition((1, 3), 4).side_b == (2, 4)
        with pytest.raises(DomainError):
            as_bipartition(Bipartition((1,), 2), 3)


class TestTensorProduct:
    def test_basis_kets(self):
        q = DimensionProfile((2,))
        out = tensor_product(ket(q, (0,)), ket(q, (1,)))
        assert np.allclose(out.amplitudes, [0, 1, 0, 0])

    def test_projector_with_maximally_mixed(self):
        q = DimensionProfile((2,))
        rho0 = ket(q, (0,)).to_density()
        mixed = DensityOperator(q, np.eye(2) / 2)
        out = tensor_product(rho0, mixed)
        assert np.allclose(out.matrix, np.diag([0.5, 0.5, 0, 0]))

    def test_plus_plus_is_uniform(self):
        q = DimensionProfile((2,))
        plus = PureState(q, np.array([1, 1]) / np.sqrt(2))
        out = tensor_product(plus, plus)
        assert np.allclose(out.amplitudes, np.full(4, 0.5))

    def test_mixed_kinds_rejected(self):
        q = DimensionProfile((2,))
        with pytest.raises(DomainError):
            tensor_product(ket(q, (0,)), ket(q, (0,)).to_density())


class TestPartialTrace:
    def test_bell_marginal_is_maximally_mixed(self):
        bell = maximally_entangled(2)
        red = partial_trace(bell.to_density(), (1,))
        assert np.allclose(red.matrix, np.eye(2) / 2, atol=1e-12)

    def test_product_state_factorizes_exactly(self, rng):
        a = rand_dm((2,), 2, rng)
        b = rand_dm((3,), 3, rng)
        joint = tensor_product(a, b)
        assert np.max(np.abs(partial_trace(joint, (1,)).matrix - a.matrix)) <= 1e-12
        assert np.max(np.abs(partial_trace(joint, (2,)).matrix - b.matrix)) <= 1e-12

    def test_keep_order_is_ascending(self, rng):
        rho = rand_dm((2, 3, 2), 4, rng)
        red = partial_trace(rho, (3, 1))
        assert red.profile.dims == (2, 2)

    def test_invalid_keep_sets(self, rng):
        rho = rand_dm((2, 2), 2, rng)
        with pytest.raises(DomainError):
            partial_trace(rho, ())
        with pytest.raises(DomainError):
            partial_trace(rho, (3,))


class TestPartialTranspose:
    def test_bell_projector_eigenvalues(self):
        bell = maximally_entangled(2)
        pt = partial_transpose(bell.to_density(), (2,))
        evals = np.sort(np.linalg.eigvalsh(pt))
        assert np.allclose(evals, [-0.5, 0.5, 0.5, 0.5], atol=1e-12)

    def test_product_state_stays_psd(self, rng):
        joint = tensor_product(rand_dm((2,), 2, rng), rand_dm((3,), 2, rng))
        pt = partial_transpose(joint, (2,))
        assert np.linalg.eigvalsh(pt)[0] >= -1e-12

    def test_schmidt_pair_eigenvectors(self, rng):
        # For sum_i sqrt(l_i)|ii>, the transposed projector has eigenvalue
        # -sqrt(l_i l_j) on (|ij> - |ji>)/sqrt(2).
        lam = rng.dirichlet(np.ones(3))
        profile = DimensionProfile((3, 3))
        vec = np.zeros(9, dtype=complex)
        for i in range(3):
            vec[profile.index_of((i, i))] = np.sqrt(lam[i])
        pt = partial_transpose(PureState(profile, vec).to_density(), (2,))
        for i in range(3):
            for j in range(i + 1, 3):
                v = np.zeros(9, dtype=complex)
                v[profile.index_of((i, j))] = 1 / np.sqrt(2)
                v[profile.index_of((j, i))] = -1 / np.sqrt(2)
                assert np.allclose(pt @ v, -np.sqrt(lam[i] * lam[j]) * v, atol=1e-10)

    def test_side_symmetry_of_spectrum(self, rng):
        for dims in ((2, 3), (2, 2, 2), (3, 2, 2)):
            rho = rand_dm(dims, 3, rng)
            n = len(dims)
            s = (1,) if n == 2 else (1, 2)
            comp = tuple(p for p in range(1, n + 1) if p not in s)
            e1 = np.sort(np.linalg.eigvalsh(partial_transpose(rho, s)))
            e2 = np.sort(np.linalg.eigvalsh(partial_transpose(rho, comp)))
            assert np.max(np.abs(e1 - e2)) <= 1e-9

    def test_full_and_empty_sets_rejected(self, rng):
        rho = rand_dm((2, 2), 2, rng)
        with pytest.raises(DomainError):
            partial_transpose(rho, (1, 2))
        with pytest.raises(DomainError):
            partial_transpose(rho, ())


class TestTraceNorm:
    def test_diagonal(self):
        assert trace_norm(np.diag([3.0, -1.0])) == pytest.approx(4.0)

    def test_density_operator_is_one(self, rng):
        rho = rand_dm((2, 3), 4, rng)
        assert trace_norm(rho.matrix) == pytest.approx(1.0, abs=1e-12)

    def test_bell_partial_transpose(self):
        pt = partial_transpose(maximally_entangled(2).to_density(), (2,))
        assert trace_norm(pt) == pytest.approx(2.0, abs=1e-12)

    def test_non_hermitian_rejected(self):
        with pytest.raises(DomainError):
            trace_norm(np.array([[0.0, 1.0], [0.0, 0.0]]))


class TestSchmidt:
    def test_already_diagonal(self):
        profile = DimensionProfile((2, 2))
        vec = np.zeros(4, dtype=complex)
        vec[profile.index_of((0, 0))] = np.sqrt(0.8)
        vec[profile.index_of((1, 1))] = np.sqrt(0.2)
        data = schmidt(PureState(profile, vec), Bipartition((1,), 2))
        assert np.allclose(data.coefficients, [0.8, 0.2], atol=1e-12)
        assert data.rank == 2

    def test_product_state_rank_one(self, rng):
        psi = rand_pure((2,), rng)
        chi = rand_pure((3,), rng)
        joint = tensor_product(psi, chi)
        data = schmidt(joint, Bipartition((1,), 2))
        assert data.rank == 1
        assert data.coefficients[0] == pytest.approx(1.0, abs=1e-12)

    def test_antisymmetric_qutrit_state_flat(self):
        data = schmidt(ou_state(), Bipartition((1,), 3))
        assert data.rank == 3
        assert np.allclose(data.coefficients, np.full(3, 1 / 3), atol=1e-12)

    def test_sum_and_reconstruction(self, rng):
        for dims, cut in (((2, 3), (1,)), ((2, 2, 3), (1, 3)), ((4, 4), (1,))):
            psi = rand_pure(dims, rng)
            bip = Bipartition(cut, len(dims))
            data = schmidt(psi, bip)
            assert abs(float(np.sum(data.coefficients)) - 1.0) <= 1e-10
            rebuilt = np.zeros(
                (data.left_basis.shape[0], data.right_basis.shape[0]), dtype=complex
            )
            for k in range(len(data.coefficients)):
                rebuilt += np.sqrt(data.coefficients[k]) * np.outer(
                    data.left_basis[:, k], data.right_basis[:, k].conj()
                )
            from crenaudit.qlinalg import cut_matrix

            assert np.max(np.abs(rebuilt - cut_matrix(psi, bip))) <= 1e-8


class TestSpectralDecomposition:
    def test_pure_projector(self, rng):
        psi = rand_pure((2, 2), rng)
        pairs = spectral_decomposition(psi.to_density())
        assert pairs[0][0] == pytest.approx(1.0, abs=1e-10)
        assert all(e < 1e-10 for e, _ in pairs[1:])

    def test_antisymmetric_pair_marginal(self):
        rho = partial_trace(ou_state().to_density(), (1, 2))
        pairs = spectral_decomposition(rho)
        evals = [e for e, _ in pairs]
        assert np.allclose(evals[:3], [1 / 3] * 3, atol=1e-12)
        assert all(e < 1e-12 for e in evals[3:])

    def test_maximally_mixed(self):
        rho = DensityOperator(DimensionProfile((3,)), np.eye(3) / 3)
        pairs = spectral_decomposition(rho)
        assert np.allclose([e for e, _ in pairs], [1 / 3] * 3)

    def test_reconstruction(self, rng):
        rho = rand_dm((2, 3), 4, rng)
        rebuilt = sum(e * np.outer(v, v.conj()) for e, v in spectral_decomposition(rho))
        assert np.max(np.abs(rebuilt - rho.matrix)) <= 1e-9
