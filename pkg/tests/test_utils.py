# tests/test_utils.py
from fractions import Fraction

import mpmath
import pytest

from utils.balls import CBall, sqrt_bounds, to_fraction
from utils.config import Config, load_config
from utils.errors import ConfigError, IterationCapExceeded, NoAdmissibleDigit, Reducible, UsageError
from utils.geometry import RegionPart, covering_radius_grid, exact_covering_radius_1d, minimal_gap


def test_config_overrides_and_checks():
    config = Config().with_overrides(prec_start=128, seed=None)
    assert config.prec_start == 128
    assert config.seed == 0
    assert list(Config(prec_start=64, prec_max=256).precisions()) == [64, 128, 256]
    with pytest.raises(ConfigError):
        Config(max_iters=0)
    with pytest.raises(ConfigError):
        Config(prec_start=512, prec_max=256)
    with pytest.raises(ConfigError):
        Config(output_format="xml")


def test_load_config_reads_the_environment(monkeypatch):
    monkeypatch.setenv("PERIODIC_MAX_LEVEL", "9")
    monkeypatch.setenv("PERIODIC_FORMAT", "HUMAN")
    config = load_config()
    assert config.max_level == 9
    assert config.output_format == "human"
    monkeypatch.setenv("PERIODIC_SEED", "seven")
    with pytest.raises(ConfigError):
        load_config()


def test_exit_codes():
    assert NoAdmissibleDigit(0).exit_code == 1
    assert IterationCapExceeded(10).exit_code == 2
    assert UsageError("x").exit_code == 3
    assert Reducible("x-1").exit_code == 3


def test_sqrt_bounds_bracket():
    lo, hi = sqrt_bounds(Fraction(2), 32)
    assert lo * lo <= 2 <= hi * hi
    assert hi - lo == Fraction(1, 2**32)


def test_ball_product_contains_the_true_value():
    a = CBall(Fraction(1, 3), Fraction(1, 7), Fraction(1, 1000))
    b = CBall(Fraction(-2, 5), Fraction(3, 11), Fraction(1, 1000))
    product = a.mul(b, 40)
    exact = complex(1 / 3, 1 / 7) * complex(-2 / 5, 3 / 11)
    assert product.contains(Fraction(exact.real), Fraction(exact.imag))


def test_ball_abs_bounds():
    lo, hi = CBall(Fraction(3), Fraction(4)).abs_bounds(32)
    assert lo <= 5 <= hi
    assert CBall(Fraction(-2), rad=Fraction(1, 4)).abs_bounds() == (Fraction(7, 4), Fraction(9, 4))


def test_exact_covering_radius_1d():
    assert exact_covering_radius_1d([Fraction(k) for k in range(-1, 2)], Fraction(-2), Fraction(2)) == 1
    assert exact_covering_radius_1d([Fraction(0), Fraction(2)], Fraction(0), Fraction(2)) == 1
    assert exact_covering_radius_1d([Fraction(5)], Fraction(0), Fraction(1)) == 5


def test_grid_covering_radius_brackets_the_lattice():
    points = [[CBall(Fraction(i), Fraction(j))] for i in range(-3, 4) for j in range(-3, 4)]
    lo, hi = covering_radius_grid(points, [RegionPart(False, CBall(Fraction(0)), Fraction(2))], 1024)
    assert lo <= Fraction(70711, 100000)
    assert Fraction(7071, 10000) <= hi < 1


def test_minimal_gap_finds_the_closest_pair():
    points = [[CBall(Fraction(v))] for v in (0, 3, Fraction(7, 2), 10)]
    lo, hi, pair = minimal_gap(points, [RegionPart(True, CBall(Fraction(0)), Fraction(1))])
    assert sorted(pair) == [1, 2]
    assert lo <= Fraction(1, 2) <= hi


@pytest.mark.parametrize(
    "value, expected",
    [
        (mpmath.mpf(-0.5), Fraction(-1, 2)),
        (mpmath.mpf(0.75), Fraction(3, 4)),
        (mpmath.mpf(-3), Fraction(-3)),
        (mpmath.mpf(0), Fraction(0)),
        (-0.25, Fraction(-1, 4)),
    ],
)
def test_to_fraction_keeps_the_sign(value, expected):
    assert to_fraction(value) == expected


def test_to_fraction_of_a_negative_solve():
    with mpmath.workprec(128):
        solution = mpmath.lu_solve(mpmath.matrix([[1, 1], [1, -1]]), mpmath.matrix([0, 2]))
    assert [to_fraction(v) for v in solution] == [Fraction(1), Fraction(-1)]


def test_ball_inclusion():
    outer = CBall(Fraction(0), Fraction(0), Fraction(1))
    assert CBall(Fraction(1, 2), Fraction(0), Fraction(1, 2)).inside(outer)
    assert not CBall(Fraction(1, 2), Fraction(1, 2), Fraction(1, 2)).inside(outer)
    assert not outer.inside(CBall(Fraction(0), Fraction(0), Fraction(1, 2)))
