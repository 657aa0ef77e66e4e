import pytest

from intervalnull import SpecialInterval, TwoByTwoTable, likelihood

CLARIFY_ACS = TwoByTwoTable(n_t=74, e_t=10, n_c=74, e_c=25)
CLARIFY_MI = TwoByTwoTable(n_t=74, e_t=5, n_c=74, e_c=14)
STAMINA_ACS = TwoByTwoTable(n_t=111, e_t=23, n_c=107, e_c=31)


@pytest.fixture
def interval():
    return SpecialInterval(0.0, 0.1)


@pytest.fixture
def lik1():
    return likelihood(CLARIFY_ACS)


@pytest.fixture
def lik2():
    return likelihood(CLARIFY_MI)


@pytest.fixture
def lik3():
    return likelihood(STAMINA_ACS)
