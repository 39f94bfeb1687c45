import os

import pytest


@pytest.fixture(scope="session", autouse=True)
def isolated_threshold_cache(tmp_path_factory):
    """Point the enumeration cache at a session directory so test runs are
    hermetic and the first n=4 enumeration cost is paid inside the session."""
    cache = tmp_path_factory.mktemp("threshold_cache")
    old = os.environ.get("POLYSELECT_CACHE")
    os.environ["POLYSELECT_CACHE"] = str(cache)
    yield
    if old is None:
        os.environ.pop("POLYSELECT_CACHE", None)
    else:
        os.environ["POLYSELECT_CACHE"] = old
