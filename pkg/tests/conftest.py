import numpy as np
import pytest

from isoresolvent import IsometricOperator


@pytest.fixture
def e1() -> IsometricOperator:
    """The running 2-d example: D(V) = span{e1}, V e1 = e2."""
    return IsometricOperator(2, [[1], [0]], [[0], [1]])


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240817)
