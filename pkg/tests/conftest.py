import pytest

from boltzalloc import load_fixture, to_problem


@pytest.fixture(scope="session")
def table2():
    return load_fixture()


@pytest.fixture(scope="session")
def table2_problem(table2):
    return to_problem(table2, reduction=0.03)
