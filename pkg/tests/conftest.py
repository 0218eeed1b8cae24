import pytest

from abasolve import instances
from abasolve.core import full_reveal_scheme, no_reveal_scheme
from abasolve.scoring import log_score, quadratic_score


@pytest.fixture
def xor_prior():
    return instances.xor_instance()[1]


@pytest.fixture
def copy_prior():
    return instances.copy_instance()[1]


@pytest.fixture
def independent_prior():
    return instances.independent_instance()[1]


@pytest.fixture
def quad():
    return quadratic_score()


@pytest.fixture
def logsc():
    return log_score()


@pytest.fixture
def xor_full_reveal(xor_prior):
    return full_reveal_scheme(xor_prior)


@pytest.fixture
def xor_no_reveal(xor_prior):
    return no_reveal_scheme(xor_prior)
