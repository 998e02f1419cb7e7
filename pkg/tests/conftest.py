import numpy as np
import pytest

from nchadamard.corpus import hadamard_corpus


@pytest.fixture(scope="session")
def corpus():
    return hadamard_corpus()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
