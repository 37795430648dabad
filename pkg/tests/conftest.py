# tests/conftest.py
from fractions import Fraction

import pytest

from engines.exact_field import construct_field
from engines.places import build_place_system
from utils.config import Config
from utils.parsing import parse_polynomial

GOLDEN = "x^2-x-1"
SALEM = "x^4-x^3-x^2-x+1"
COMPLEX_PISOT = "x^2+2*x+2"
TWO = "x-2"


@pytest.fixture
def config():
    return Config(prec_start=64, prec_max=1024, max_iters=200_000, max_level=6,
                  memory_points=50_000, grid_points=1024, workers=2)


def make_system(text: str, config: Config, root_index=None):
    field = construct_field(parse_polynomial(text), root_index)
    return build_place_system(field, config, root_index)


@pytest.fixture
def two(config):
    return make_system(TWO, config)


@pytest.fixture
def golden(config):
    return make_system(GOLDEN, config)


@pytest.fixture
def salem(config):
    return make_system(SALEM, config)


@pytest.fixture
def gaussian(config):
    return make_system(COMPLEX_PISOT, config)


@pytest.fixture
def three_halves(config):
    return make_system("2*x-3", config)


def q(text) -> Fraction:
    return Fraction(text)
