import pytest
from fractions import Fraction

from polyaurn import dirac, make_urn


@pytest.fixture
def classic():
    """Two colours; a drawn ball is returned with one more of its colour."""
    return make_urn(2, [dirac((1, 0)), dirac((0, 1))], [1, 1], [1, 1])


@pytest.fixture
def friedman():
    """Two colours; a drawn ball is returned with one of the other colour."""
    return make_urn(2, [dirac((0, 1)), dirac((1, 0))], [1, 1], [1, 1])


@pytest.fixture
def doubling_friedman():
    """Friedman-style replacements that add two balls of the other colour."""
    return make_urn(2, [dirac((0, 2)), dirac((2, 0))], [1, 1], [1, 1])


@pytest.fixture
def chain_urn():
    """Colour 0 feeds colour 1; colour 1 feeds only itself."""
    return make_urn(2, [dirac((0, 1)), dirac((0, 1))], [1, 1], [1, 1])


def fr(n, d=1):
    return Fraction(n, d)
