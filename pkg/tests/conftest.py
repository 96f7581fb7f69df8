import pytest
from hypothesis import HealthCheck, settings

from liquidity_merton.model import ModelParams

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def base():
    return ModelParams()


@pytest.fixture
def hyperbolic():
    return ModelParams(gamma=-1.0, mu=0.1)


@pytest.fixture
def square_root():
    return ModelParams(gamma=0.5, mu=0.0625)


@pytest.fixture
def abel():
    return ModelParams(gamma=-0.5, mu=0.0875)
