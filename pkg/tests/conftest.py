import logging

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")
logging.getLogger("faircut").setLevel(logging.ERROR)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
