import pytest

from otsske import scheme
from otsske.groups import DeterministicRandomness, setup


@pytest.fixture(scope="session")
def group():
    return setup(256)


@pytest.fixture(scope="session")
def toy_params():
    """Smallest exhaustively checkable configuration: t^n = 4 subsets."""
    return scheme.SchemeParams(sessions=2, symbols=2, radix=2)


@pytest.fixture(scope="session")
def medium_params():
    """Collision-safe subset space (2^32) at moderate cost."""
    return scheme.SchemeParams(sessions=4, symbols=16, radix=4)


@pytest.fixture(scope="session")
def toy_keys(toy_params, group):
    return scheme.keygen_setup(toy_params, DeterministicRandomness(101), group=group)


@pytest.fixture(scope="session")
def medium_keys(medium_params, group):
    return scheme.keygen_setup(medium_params, DeterministicRandomness(202), group=group)


@pytest.fixture()
def rng():
    return DeterministicRandomness(0)


def make_rng(seed):
    return DeterministicRandomness(seed)
