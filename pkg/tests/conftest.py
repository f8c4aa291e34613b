import pytest

from ldpc_alpha.ensemble import Ensemble, irregular_example


@pytest.fixture(scope="session")
def reg23():
    return Ensemble.regular(2, 3)


@pytest.fixture(scope="session")
def reg36():
    return Ensemble.regular(3, 6)


@pytest.fixture(scope="session")
def irr():
    return irregular_example()


def all_ensembles():
    return [Ensemble.regular(2, 3), Ensemble.regular(3, 6), Ensemble.regular(3, 4), irregular_example()]
