# tests/test_approximation.py
import random
from fractions import Fraction

import pytest

from engines.approximation import (
    Alphabet,
    approximation_error,
    complex_pisot_bound,
    integer_alphabet,
    lattice_covering_radius,
    suggest_alphabet,
    validate_cover,
    weak_approximate,
)
from utils.balls import CBall
from utils.errors import AlphabetError, UsageError


def values(alphabet):
    return [d.rational_value() for d in alphabet]


def test_alphabet_validation(two):
    one = two.field.one()
    with pytest.raises(AlphabetError):
        Alphabet(())
    with pytest.raises(AlphabetError):
        Alphabet((one, one))
    with pytest.raises(AlphabetError):
        integer_alphabet(two.field, 2, 1)


def test_alphabet_helpers(golden):
    alphabet = integer_alphabet(golden.field, -1, 1)
    assert len(alphabet) == 3
    assert alphabet.contains_zero()
    assert alphabet.is_integer_range()
    assert alphabet.index(golden.field.one()) == 2
    assert len(alphabet.differences()) == 5


def test_weak_approximate_rational_target(golden):
    z = weak_approximate(golden, [Fraction(3, 10)], Fraction(1, 100))
    assert z == Fraction(3, 10)


def test_weak_approximate_zero_targets(salem):
    z = weak_approximate(salem, [0, 0], Fraction(1, 1000))
    assert z.is_zero()


@pytest.mark.slow
def test_weak_approximate_salem_mixed_targets(salem):
    targets = [0, CBall(Fraction(1))]
    z = weak_approximate(salem, targets, Fraction(1, 20))
    assert approximation_error(salem, z, targets, 2 * salem.config.prec_start) < Fraction(1, 20)


def test_weak_approximate_argument_checks(golden):
    with pytest.raises(UsageError):
        weak_approximate(golden, [0], 0)
    with pytest.raises(UsageError):
        weak_approximate(golden, [0, 0], Fraction(1, 10))


def test_lattice_covering_radius_is_bounded(golden):
    radius = lattice_covering_radius(golden, 20, random.Random(3))
    assert 0 <= radius < 2


def test_guaranteed_alphabet_for_two(two):
    assert values(suggest_alphabet(two)) == [-2, -1, 0, 1, 2]


def test_guaranteed_alphabet_for_three_halves(three_halves):
    alphabet = suggest_alphabet(three_halves)
    assert values(alphabet) == [Fraction(j, 2) for j in range(-3, 4)]
    assert validate_cover(three_halves, alphabet).certified


def test_complex_pisot_bound(gaussian):
    assert complex_pisot_bound(gaussian) == 2
    assert values(suggest_alphabet(gaussian, "complex-pisot-bound")) == [-2, -1, 0, 1, 2]


def test_integer_range_mode(salem):
    alphabet = suggest_alphabet(salem, "integer-range", 2)
    assert values(alphabet) == [-2, -1, 0, 1, 2]
    assert alphabet.cover_tags is None
    with pytest.raises(UsageError):
        suggest_alphabet(salem, "integer-range")
    with pytest.raises(UsageError):
        suggest_alphabet(salem, "largest")


def test_validate_cover_for_two(two):
    assert validate_cover(two, integer_alphabet(two.field, -1, 1)).certified
    refuted = validate_cover(two, integer_alphabet(two.field, 0, 1))
    assert refuted.verdict == "refuted"


def test_requested_margin_downgrades_an_exact_cover(two):
    cert = validate_cover(two, integer_alphabet(two.field, -1, 1), margin=Fraction(1, 16))
    assert cert.verdict == "indeterminate"


def test_golden_integer_cover(golden):
    cert = validate_cover(golden, integer_alphabet(golden.field, -1, 1))
    assert cert.certified
    assert cert.margin > 0


@pytest.mark.slow
def test_salem_guaranteed_alphabet_is_certified(salem):
    alphabet = suggest_alphabet(salem)
    assert alphabet.cover_tags is not None
    assert alphabet.contains_zero()
    cert = validate_cover(salem, alphabet)
    assert cert.certified
    assert cert.margin > alphabet.epsilon


def _random_targets(ps, rng):
    targets = []
    for place in ps.archimedean_s_beta:
        re = Fraction(rng.randint(-1000, 1000), 1000)
        im = Fraction(0) if place.is_real else Fraction(rng.randint(-1000, 1000), 1000)
        targets.append(CBall(re, im))
    return targets


@pytest.mark.slow
@pytest.mark.parametrize("system", ["golden", "salem"])
def test_weak_approximation_of_seeded_targets(request, system):
    ps = request.getfixturevalue(system)
    rng = random.Random(8)
    eps = Fraction(1, 32)
    for _ in range(50):
        targets = _random_targets(ps, rng)
        z = weak_approximate(ps, targets, eps)
        assert approximation_error(ps, z, targets, 2 * ps.config.prec_start) < eps


def test_lattice_covering_radius_of_the_salem_lattice(salem):
    radius = lattice_covering_radius(salem, 10, random.Random(4))
    # rounding moves each coordinate by at most 1/2: error <= (1 + b + b^2 + b^3) / 2 < 5.41
    assert 0 < radius < 6
