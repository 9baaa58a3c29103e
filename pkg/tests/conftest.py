import math
import os

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default",
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.register_profile(
    "thorough",
    max_examples=1000,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def closed_cdf(n: int, alpha: float, x: float) -> float:
    """Elementary distribution functions for n = 1, 2, 3, used as oracles."""
    s = math.hypot(1.0, alpha)
    u = x / s
    if n == 1:
        return 0.5 + math.atan(u) / math.pi
    if n == 2:
        return 0.5 + 0.5 * u / math.hypot(1.0, u)
    if n == 3:
        return 0.5 + (math.atan(u) + u / (1.0 + u * u)) / math.pi
    raise ValueError(n)


@pytest.fixture
def rng():
    import numpy as np

    return np.random.default_rng(20240611)
