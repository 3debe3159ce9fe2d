import numpy as np
import pytest

from pkit.instances import (
    coupled_model,
    diag_model,
    example1_components,
    example1_realization,
    jordan_model,
)


@pytest.fixture(scope="session")
def diag():
    return diag_model()


@pytest.fixture(scope="session")
def jordan():
    return jordan_model()


@pytest.fixture(scope="session")
def coupled():
    return coupled_model()


@pytest.fixture(scope="session")
def example1():
    return example1_realization()


@pytest.fixture(scope="session")
def example1_pair():
    return example1_components()


@pytest.fixture(scope="session")
def example1_j():
    return np.array(
        [
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
            [0.0, 0.0, 1.0, 0.0],
        ]
    )
