import os

import pytest
from hypothesis import HealthCheck, settings

from spstab.ringkernel import parse_ring

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", deadline=None, max_examples=200,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

SMALL_RINGS = ["2", "3", "4", "5", "7", "9"]


@pytest.fixture(params=SMALL_RINGS)
def ring(request):
    return parse_ring(request.param)


@pytest.fixture
def F3():
    return parse_ring("3")


@pytest.fixture
def F5():
    return parse_ring("5")
