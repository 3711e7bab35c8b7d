import numpy as np
import pytest

from crenaudit import DensityOperator, DimensionProfile, PureState


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def rand_pure(dims, rng) -> PureState:
    profile = DimensionProfile(tuple(dims))
    z = rng.standard_normal(profile.size) + 1j * rng.standard_normal(profile.size)
    return PureState(profile, z / np.linalg.norm(z))


def rand_dm(dims, rank, rng) -> DensityOperator:
    """Rank-controlled random density operator (Ginibre construction)."""
    profile = DimensionProfile(tuple(dims))
    g = rng.standard_normal((profile.size, rank)) + 1j * rng.standard_normal(
        (profile.size, rank)
    )
    m = g @ g.conj().T
    m /= np.trace(m).real
    return DensityOperator(profile, m)
