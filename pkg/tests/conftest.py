import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from lorentz_capillary import kernels

settings.register_profile(
    "default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@pytest.fixture(params=["numba", "numpy"])
def backend(request):
    """Run a test under each kernel backend."""
    before = kernels.get_backend()
    kernels.set_backend(request.param)
    yield request.param
    kernels.set_backend(before)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
