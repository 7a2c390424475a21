import numpy as np
import pytest

from polytoeplitz.freemonoid import Word
from polytoeplitz.weights import PolydomainSpec


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)


@pytest.fixture
def single_shift_spec():
    """k=1, one generator, f = z."""
    return PolydomainSpec(k=1, n=(1,), m=(1,), coeffs=({Word((1,), 1): 1.0},))


def make_spec(k, n, m, entries):
    """entries: list of (factor 1-based, letters tuple, value)."""
    maps = [dict() for _ in range(k)]
    for i, letters, a in entries:
        maps[i - 1][Word(tuple(letters), n[i - 1])] = a
    return PolydomainSpec(k=k, n=tuple(n), m=tuple(m), coeffs=tuple(maps))


@pytest.fixture
def bergman2_spec():
    """k=1, one generator, f = z, order 2 (weights 1,2,3,...)."""
    return make_spec(1, (1,), (2,), [(1, (1,), 1.0)])


@pytest.fixture
def two_gen_ball_spec():
    """k=1, two generators, f = Z1 + Z2, order 1 (all weights 1)."""
    return make_spec(1, (2,), (1,), [(1, (1,), 1.0), (1, (2,), 1.0)])
