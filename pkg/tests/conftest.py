import pytest

from medianite.catalog import catalog


@pytest.fixture(scope="session")
def cat():
    return catalog()
