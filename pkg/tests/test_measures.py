import numpy as np
import pytest

from crenaudit import (
    Bipartition,
    DensityOperator,
    DimensionProfile,
    DomainError,
    PureState,
    concurrence_pure,
    haar_unitary,
    maximally_entangled,
    negativity_mixed,
    negativity_pure,
    ou_state,
    tensor_product,
    wootters_concurrence_2q,
)

from conftest import rand_dm, rand_pure


def two_term_state(lam0, rng, dims=(3, 4)):
    """Random state with Schmidt rank 2 and coefficients (lam0, 1-lam0)."""
    profile = DimensionProfile(dims)
    vec = np.zeros(profile.size, dtype=complex)
    vec[profile.index_of((0, 0))] = np.sqrt(lam0)
    vec[profile.index_of((1, 1))] = np.sqrt(1 - lam0)
    ua = haar_unitary(dims[0], rng)
    ub = haar_unitary(dims[1], rng)
    rotated = np.kron(ua, ub) @ vec
    return PureState(profile, rotated)


def werner(w):
    bell = maximally_entangled(2).to_density().matrix
    return DensityOperator(DimensionProfile((2, 2)), w * bell + (1 - w) * np.eye(4) / 4)


class TestConcurrencePure:
    def test_bell(self):
        assert concurrence_pure(maximally_entangled(2), 1) == pytest.approx(1.0)

    def test_product_state(self, rng):
        # sqrt(2(1 - purity)) has a ~1e-8 conditioning floor at purity 1.
        joint = tensor_product(rand_pure((2,), rng), rand_pure((3,), rng))
        assert concurrence_pure(joint, 1) == pytest.approx(0.0, abs=1e-7)

    def test_antisymmetric_qutrit(self):
        assert concurrence_pure(ou_state(), 1) == pytest.approx(np.sqrt(4 / 3), abs=1e-12)


class TestNegativityPure:
    def test_two_term_value(self):
        profile = DimensionProfile((2, 2))
        vec = np.zeros(4, dtype=complex)
        vec[0] = np.sqrt(0.8)
        vec[3] = np.sqrt(0.2)
        assert negativity_pure(PureState(profile, vec), 1) == pytest.approx(0.8, abs=1e-10)

    def test_maximally_entangled_qutrits(self):
        assert negativity_pure(maximally_entangled(3), 1) == pytest.approx(2.0, abs=1e-10)

    def test_rank_two_equals_concurrence(self, rng):
        for _ in range(20):
            psi = two_term_state(rng.uniform(0.05, 0.95), rng)
            n = negativity_pure(psi, 1)
            c = concurrence_pure(psi, 1)
            assert abs(n - c) <= 1e-12

    def test_three_paths_agree_on_random_states(self, rng):
        # The function itself raises if its Schmidt, marginal-root and
        # partial-transpose routes disagree beyond tolerance.
        for dims in ((2, 2), (3, 2), (3, 3), (4, 4), (2, 2, 2), (4, 4, 4)):
            for _ in range(5):
                psi = rand_pure(dims, rng)
                cut = Bipartition((1,), len(dims))
                value = negativity_pure(psi, cut)
                assert value >= 0.0


class TestNegativityMixed:
    def test_separable_mixture_is_ppt(self, rng):
        profile = DimensionProfile((2, 3))
        mats = []
        for _ in range(4):
            mats.append(tensor_product(rand_dm((2,), 2, rng), rand_dm((3,), 2, rng)).matrix)
        weights = rng.dirichlet(np.ones(4))
        rho = DensityOperator(profile, sum(w * m for w, m in zip(weights, mats)))
        assert negativity_mixed(rho, 1) == 0.0

    def test_bell_projector(self):
        assert negativity_mixed(maximally_entangled(2).to_density(), 1) == pytest.approx(
            1.0, abs=1e-12
        )

    def test_werner_boundary(self):
        assert negativity_mixed(werner(1 / 3), 1) == pytest.approx(0.0, abs=1e-12)
        assert negativity_mixed(werner(0.5), 1) > 0.01

    def test_lower_bounds_every_decomposition_average(self, rng):
        # Convexity: the trace-norm negativity never exceeds the average
        # pure-state negativity of any decomposition.
        from crenaudit import RootSet, average_negativity, decomposition_from_unitary

        for dims in ((2, 2), (3, 2)):
            rho = rand_dm(dims, 3, rng)
            floor = negativity_mixed(rho, 1)
            roots = RootSet.from_density(rho)
            for _ in range(8):
                dec = decomposition_from_unitary(roots, haar_unitary(4, rng))
                assert average_negativity(dec, 1) >= floor - 1e-9


class TestWoottersConcurrence:
    def test_bell(self):
        assert wootters_concurrence_2q(maximally_entangled(2).to_density()) == pytest.approx(
            1.0, abs=1e-10
        )

    def test_werner_values(self):
        assert wootters_concurrence_2q(werner(1.0)) == pytest.approx(1.0, abs=1e-10)
        assert wootters_concurrence_2q(werner(1 / 3)) == pytest.approx(0.0, abs=1e-10)
        # Known closed form: C = max(0, (3w-1)/2) for Bell-diagonal Werner states.
        assert wootters_concurrence_2q(werner(0.8)) == pytest.approx(0.7, abs=1e-10)

    def test_maximally_mixed(self):
        rho = DensityOperator(DimensionProfile((2, 2)), np.eye(4) / 4)
        assert wootters_concurrence_2q(rho) == 0.0

    def test_wrong_profile_rejected(self, rng):
        with pytest.raises(DomainError):
            wootters_concurrence_2q(rand_dm((3, 2), 2, rng))

    def test_pure_input_matches_pure_concurrence(self, rng):
        # The spin-flip formula subtracts sqrt of three zero eigenvalues,
        # each carrying ~1e-8 of sqrt-amplified solver noise.
        for _ in range(10):
            psi = rand_pure((2, 2), rng)
            assert wootters_concurrence_2q(psi.to_density()) == pytest.approx(
                concurrence_pure(psi, 1), abs=1e-7
            )
