import pytest

from rainbow_pricer import Component, GaussianMixture

RATE = 0.025


@pytest.fixture(scope="session")
def asset1_mixture() -> GaussianMixture:
    # first bundled asset: low-weight wide regime plus dominant narrow regime
    return GaussianMixture(
        (
            Component(0.07845771, -0.0072328, 0.0603574),
            Component(0.92154229, 0.000764489, 0.013530408),
        )
    )


@pytest.fixture(scope="session")
def asset2_mixture() -> GaussianMixture:
    return GaussianMixture(
        (
            Component(0.83729906, 0.00110506, 0.01014017),
            Component(0.16270094, -0.00101651, 0.03315738),
        )
    )


@pytest.fixture(scope="session")
def rate() -> float:
    return RATE
