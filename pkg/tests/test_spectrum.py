# tests/test_spectrum.py
from fractions import Fraction

import pytest

from engines.approximation import Alphabet, integer_alphabet
from engines.places import build_place_system
from engines.spectrum import (
    SpectrumLevel,
    covering_radius,
    csv_header,
    density_test,
    enumerate_spectrum,
    min_gap,
    separation_bound,
    to_rows,
    window,
)
from utils.balls import CBall
from utils.errors import MemoryBudgetExceeded, UnitCirclePlacePresent, UsageError
from utils.geometry import RegionPart


def rationals(level):
    return sorted(x.rational_value() for x in level.points)


def test_enumerate_binary_integers(two):
    level = enumerate_spectrum(two, integer_alphabet(two.field, 0, 1), 2)
    assert rationals(level) == list(range(8))


def test_enumerate_balanced_digits(two):
    level = enumerate_spectrum(two, integer_alphabet(two.field, -1, 1), 1)
    assert rationals(level) == list(range(-3, 4))


def test_enumerate_golden(golden):
    level = enumerate_spectrum(golden, integer_alphabet(golden.field, 0, 1), 1)
    beta = golden.field.beta
    assert set(level.points) == {golden.field.zero(), golden.field.one(), beta, beta + 1}


def test_enumeration_deduplicates(golden):
    # 100 and 011 are the same point beta^2 = beta + 1
    level = enumerate_spectrum(golden, integer_alphabet(golden.field, 0, 1), 2)
    assert len(level) == 7


def test_enumeration_budget(two, config):
    tight = build_place_system(two.field, config.with_overrides(memory_points=10))
    with pytest.raises(MemoryBudgetExceeded):
        enumerate_spectrum(tight, integer_alphabet(two.field, 0, 1), 5)


def test_pruning_drops_far_points(two):
    level = enumerate_spectrum(two, integer_alphabet(two.field, 0, 1), 3, prune_radius=Fraction(5))
    assert rationals(level) == list(range(6))
    assert level.pruned > 0


def test_separation_bound(two, golden):
    assert separation_bound(two, integer_alphabet(two.field, 0, 1)) == 1
    bound = separation_bound(golden, integer_alphabet(golden.field, 0, 1))
    assert float(bound) == pytest.approx(0.381966, abs=1e-3)
    assert bound <= Fraction(381967, 10**6)


def test_min_gap(two, golden):
    level = enumerate_spectrum(two, integer_alphabet(two.field, 0, 1), 3)
    assert min_gap(level, two) == (1, 1)
    alphabet = integer_alphabet(golden.field, 0, 1)
    lo, hi = min_gap(enumerate_spectrum(golden, alphabet, 4), golden)
    assert lo > Fraction(38, 100)
    assert lo >= separation_bound(golden, alphabet) - Fraction(1, 10**6)
    assert lo <= hi


def test_min_gap_needs_two_points(two):
    level = enumerate_spectrum(two, integer_alphabet(two.field, 0, 0), 3)
    with pytest.raises(UsageError):
        min_gap(level, two)


def test_covering_radius_of_binary_integers(two):
    level = enumerate_spectrum(two, integer_alphabet(two.field, 0, 1), 3)
    region = [RegionPart(True, CBall(Fraction(4)), Fraction(4))]
    lo, hi = covering_radius(level, region, two)
    assert lo <= Fraction(1, 2) <= hi
    assert hi - lo < Fraction(1, 50)


def test_covering_radius_with_missing_odd_integers(two):
    evens = Alphabet((two.field.zero(), two.field.from_rational(2)))
    level = enumerate_spectrum(two, evens, 2)
    assert rationals(level) == [0, 2, 4, 6, 8, 10, 12, 14]
    region = [RegionPart(True, CBall(Fraction(7, 2)), Fraction(7, 2))]
    lo, hi = covering_radius(level, region, two)
    assert lo <= 1 <= hi


def test_window_radius(two):
    (part,) = window(two, 3)
    assert part.radius == 8
    (part,) = window(two, 2, Fraction(1, 2))
    assert part.radius == 2


def test_covering_radius_input_checks(two):
    with pytest.raises(UsageError):
        covering_radius(SpectrumLevel(1, ()), window(two, 1), two)
    level = enumerate_spectrum(two, integer_alphabet(two.field, 0, 1), 1)
    with pytest.raises(UsageError):
        covering_radius(level, [], two)


def test_density_verdicts(two):
    dense = density_test(two, integer_alphabet(two.field, -1, 1))
    assert dense.verdict == "certified-dense"
    sparse = density_test(two, integer_alphabet(two.field, 0, 1))
    assert sparse.verdict == "evidence-sparse"
    assert len(sparse.trend) >= 2


def test_density_refuses_unit_places(salem):
    with pytest.raises(UnitCirclePlacePresent):
        density_test(salem, integer_alphabet(salem.field, -2, 2))


def test_csv_rows(golden):
    level = enumerate_spectrum(golden, integer_alphabet(golden.field, 0, 1), 1)
    header = csv_header(golden)
    rows = to_rows(level, golden)
    assert header[:2] == ["c0", "c1"]
    assert len(rows) == 4
    assert all(len(row) == len(header) for row in rows)


def test_salem_separation_bound_counts_each_place_once(salem):
    bound = separation_bound(salem, integer_alphabet(salem.field, -2, 2))
    # 9.54^(-1/3): one real expanding place plus one complex unit place
    assert float(bound) == pytest.approx(0.4715, abs=1e-3)


@pytest.mark.slow
@pytest.mark.parametrize(
    "system, lo_digit, hi_digit, top_level",
    [("two", 0, 1, 8), ("golden", 0, 1, 8), ("salem", -2, 2, 6)],
)
def test_measured_gaps_respect_the_separation_bound(request, system, lo_digit, hi_digit, top_level):
    ps = request.getfixturevalue(system)
    alphabet = integer_alphabet(ps.field, lo_digit, hi_digit)
    bound = separation_bound(ps, alphabet)
    assert bound > 0
    for n in range(1, top_level + 1):
        lo, hi = min_gap(enumerate_spectrum(ps, alphabet, n), ps)
        assert lo <= hi
        assert lo >= bound - Fraction(1, 10**6), n
