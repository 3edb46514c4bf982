import pytest
from hypothesis import HealthCheck, settings

from lazybench.corpus import gen_corpus

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def corpus():
    return gen_corpus(seed=0, count=500)
