import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "repo",
    derandomize=True,
    max_examples=120,
    suppress_health_check=[HealthCheck.too_slow],
    deadline=None,
)
settings.load_profile("repo")


@pytest.fixture
def rng():
    return np.random.default_rng(13)
