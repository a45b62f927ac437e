import warnings

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "fast",
    max_examples=40,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.filter_too_much],
)
settings.load_profile("fast")


@pytest.fixture(autouse=True)
def _quiet_singularity_warnings():
    # the trig/exp family legitimately emits a 1/x-term warning; tests that
    # assert on it use pytest.warns explicitly
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", category=UserWarning)
        yield


@pytest.fixture(scope="session")
def corpus_pairs():
    from nullag.corpus import all_pairs

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", category=UserWarning)
        return all_pairs(seed=0)


@pytest.fixture(scope="session")
def gauge_corpus():
    from nullag.corpus import gauge_examples

    return gauge_examples()
