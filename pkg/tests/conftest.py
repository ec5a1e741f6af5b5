import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from deconv.kernels import BumpKernel, GaussianKernel

settings.register_profile(
    "numeric",
    max_examples=25,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("numeric")


@pytest.fixture(scope="session")
def gaussian():
    return GaussianKernel()


@pytest.fixture(scope="session")
def bump():
    return BumpKernel()


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20260808)
