import os

import pytest
from hypothesis import HealthCheck, settings

from zetagaps.arith import build_spf_sieve

settings.register_profile(
    "default", deadline=None, suppress_health_check=[HealthCheck.too_slow], derandomize=True
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture(scope="session")
def sieve_1e6():
    return build_spf_sieve(10**6)


@pytest.fixture(scope="session")
def sieve_small():
    return build_spf_sieve(10**5)
