import pytest

from zwrlab import default_model
from zwrlab.floquet import numerov_grid


@pytest.fixture(scope="session")
def model():
    return default_model()


@pytest.fixture(scope="session")
def grid(model):
    return numerov_grid(model)
