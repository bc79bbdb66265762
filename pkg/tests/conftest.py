import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def random_stochastic(rng: np.random.Generator, *shape) -> np.ndarray:
    a = rng.random(shape) + 0.05
    return a / a.sum(axis=-1, keepdims=True)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
