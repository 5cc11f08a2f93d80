import pytest

from udcohom.galois import make_config


@pytest.fixture(scope="session")
def cfg3():
    return make_config([3], 2)


@pytest.fixture(scope="session")
def cfg21():
    return make_config([3, 7], 2)


@pytest.fixture(scope="session")
def cfg91():
    return make_config([7, 13], 6)
