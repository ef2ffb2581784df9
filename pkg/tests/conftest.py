import numpy as np
import pytest

from diracpairs.spectral import CircleDiracModel, TruncationWindow


@pytest.fixture
def trivial_model():
    return CircleDiracModel(delta=0.0, theta=0.0, length=1.0, rank=1)


@pytest.fixture
def doubled_model():
    return CircleDiracModel(delta=0.0, theta=0.0, length=1.0, rank=1, doubled=True)


@pytest.fixture
def window4():
    return TruncationWindow(4)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
