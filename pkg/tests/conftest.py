"""Shared fixtures; puts src/ on sys.path the same way main.py does"""

import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent.parent / 'src'))

from frames.base import FrameFamily  # noqa: E402
from frames.generators import gen_onb, gen_mercedes, gen_dft  # noqa: E402


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def unit_vector(rng):
    """Factory for random unit vectors in C^d"""
    def make(d):
        z = rng.standard_normal(d) + 1j * rng.standard_normal(d)
        return z / np.linalg.norm(z)
    return make


@pytest.fixture
def onb2():
    return gen_onb(2)


@pytest.fixture
def onb_scaled_pair():
    """ONB(2) against 2 * ONB(2): universal bounds (1, 4)"""
    return gen_onb(2), gen_onb(2).scaled(2.0)


@pytest.fixture
def swapped_pair():
    """{e1, e2} against {e2, e1}: the weaving at sigma={0} is {e1, e1}"""
    return FrameFamily([[1, 0], [0, 1]]), FrameFamily([[0, 1], [1, 0]])


@pytest.fixture
def mercedes():
    return gen_mercedes()


@pytest.fixture
def dft24():
    return gen_dft(2, 4)


@pytest.fixture
def doubled_basis():
    """{e1, e2, e1, e2}/sqrt(2): Parseval, and S^sigma = I/2 for sigma = {0, 1}"""
    return FrameFamily(np.vstack([np.eye(2), np.eye(2)]) / np.sqrt(2))
