import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", deadline=None, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

PLANT_24 = np.array([0, 0, 1, 1, 0, 1, 1, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 1, 1, 0, 1, 1, 0],
                    dtype=np.int8)
"""P=24, N=9, three-level off-peak autocorrelation {2, 3, 4}; its own shifts are the only
sequences with that autocorrelation (checked exhaustively), so recovery is unambiguous."""

HOMOMETRIC_24 = np.array([1, 0, 0, 1, 0, 1, 1, 1, 1, 0, 1, 1, 0, 0, 0, 0, 1, 0, 0, 0, 1, 0, 1, 1],
                         dtype=np.int8)
"""P=24, N=12, off-peak values {5, 6}; shares its autocorrelation with 7 other shift classes."""


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
