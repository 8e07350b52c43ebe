import pytest

from pmlab.counting import enumerate_regular


@pytest.fixture(scope="session")
def ensembles():
    cache = {}

    def get(n, d):
        if (n, d) not in cache:
            cache[(n, d)] = enumerate_regular(n, d)
        return cache[(n, d)]

    return get
