# tests/test_rep_engine.py
from fractions import Fraction

import pytest

from engines.approximation import integer_alphabet, suggest_alphabet
from engines.rep_engine import (
    DomainSpec,
    Policy,
    Representation,
    canonical_word,
    digits_word,
    frp_bound_check,
    in_domain,
    represent,
    shift_L,
    split_parts,
    step,
    value_of,
    verify,
)
from utils.errors import IterationCapExceeded, NoAdmissibleDigit, UsageError


def el(ps, value):
    return ps.field.from_rational(Fraction(value))


@pytest.fixture
def binary(two):
    return integer_alphabet(two.field, 0, 1)


def test_domain_membership(two):
    spec = DomainSpec()
    assert in_domain(two.field.zero(), spec, two)
    assert in_domain(el(two, 1), spec, two)
    assert not in_domain(el(two, Fraction(3, 2)), spec, two)


def test_domain_and_policy_checks():
    with pytest.raises(UsageError):
        DomainSpec(Fraction(1, 2))
    with pytest.raises(UsageError):
        Policy(mode="greedy")
    with pytest.raises(UsageError):
        Policy(max_iters=0)


def test_shift_L(two, salem):
    assert shift_L(two.field.zero(), two) == (0, 1)
    assert shift_L(el(two, 5), two) == (3, 1)
    assert shift_L(el(salem, Fraction(1, 2)), salem) == (0, 1)


def test_shift_L_stops_at_the_shift_cap(two):
    with pytest.raises(IterationCapExceeded):
        shift_L(el(two, 5), two, max_shift=2)
    assert shift_L(el(two, 5), two, max_shift=3) == (3, 1)


def test_shift_L_grows_m_at_unit_places(salem):
    L, m = shift_L(el(salem, 3), salem)
    assert m == Fraction(1, 16) + 3
    assert L >= 1


def test_step_first_fit(two, binary):
    spec, policy = DomainSpec(), Policy()
    assert step(el(two, Fraction(1, 3)), binary, spec, policy, two) == (0, el(two, Fraction(2, 3)))
    assert step(el(two, Fraction(2, 3)), binary, spec, policy, two) == (1, el(two, Fraction(1, 3)))


def test_step_respects_finite_places(three_halves):
    alphabet = integer_alphabet(three_halves.field, 0, 2)
    with pytest.raises(NoAdmissibleDigit):
        step(el(three_halves, Fraction(1, 2)), alphabet, DomainSpec(), Policy(), three_halves)


def test_represent_one_third(two, binary):
    rep, trace = represent(el(two, Fraction(1, 3)), binary, Policy(), two)
    assert (rep.L, rep.preperiod, rep.period) == (0, (), (0, 1))
    assert trace.cycle_start == 0
    assert trace.states[trace.cycle_start] == trace.states[-1]
    assert verify(rep, el(two, Fraction(1, 3)))


def test_represent_zero(golden):
    alphabet = integer_alphabet(golden.field, -1, 1)
    rep, _ = represent(golden.field.zero(), alphabet, Policy(), golden)
    assert (rep.L, rep.preperiod, rep.period) == (0, (), (1,))
    assert value_of(rep).is_zero()


@pytest.mark.parametrize("x", ["1/2", "2/3", "-5/7", "3", "-11/4"])
def test_golden_round_trips(golden, x):
    alphabet = integer_alphabet(golden.field, -1, 1)
    value = el(golden, Fraction(x))
    rep, trace = represent(value, alphabet, Policy(), golden)
    assert verify(rep, value)
    assert len(set(trace.states[:-1])) == len(trace.states) - 1


def test_golden_round_trip_of_an_irrational(golden):
    alphabet = integer_alphabet(golden.field, -1, 1)
    value = golden.field.element([Fraction(1, 3), Fraction(-2, 5)])
    rep, _ = represent(value, alphabet, Policy(), golden)
    assert verify(rep, value)


def test_rational_base_with_residue_digits(three_halves):
    alphabet = suggest_alphabet(three_halves)
    for x in ("1/2", "7/5", "-3"):
        value = el(three_halves, Fraction(x))
        rep, _ = represent(value, alphabet, Policy(), three_halves)
        assert verify(rep, value)


def test_iteration_cap(two, binary):
    with pytest.raises(IterationCapExceeded):
        represent(el(two, Fraction(1, 3)), binary, Policy(max_iters=1), two)


def test_value_of_examples(two, binary):
    def rep(preperiod, period, L=0):
        return Representation(two.field, binary, L, preperiod, period)

    assert value_of(rep((), (1,))) == 1
    assert value_of(rep((), (0, 1))) == Fraction(1, 3)
    assert value_of(rep((), (0,))) == 0
    assert verify(rep((), (1,)), el(two, 1))
    assert not verify(rep((), (1,)), el(two, Fraction(1, 2)))
    assert value_of(rep((1,), (0,), L=2)) == 2


def test_representation_checks(two, binary):
    with pytest.raises(UsageError):
        Representation(two.field, binary, 0, (), ())
    with pytest.raises(UsageError):
        Representation(two.field, binary, 0, (), (2,))


def test_canonical_word():
    assert canonical_word((), (0, 1, 0, 1)) == ((), (0, 1))
    assert canonical_word((1,), (0, 1)) == ((), (1, 0))
    assert canonical_word((0, 1), (1,)) == ((0,), (1,))


def test_digits_word(two, binary):
    rep = Representation(two.field, binary, 1, (1,), (1, 0))
    assert digits_word(rep, 5) == [1, 1, 0, 1, 0]


def test_split_parts(two, binary):
    x = el(two, Fraction(5, 3))
    rep, _ = represent(x, binary, Policy(), two)
    inp, frp_rep = split_parts(rep)
    assert inp == 1
    assert frp_rep.L == 0
    assert value_of(frp_rep) == Fraction(2, 3)
    assert frp_bound_check(rep, two)


def test_split_parts_of_an_integer(two, binary):
    x = el(two, 3)
    rep, _ = represent(x, binary, Policy(), two)
    inp, frp_rep = split_parts(rep)
    assert inp + value_of(frp_rep) == x
    assert inp == 2


def test_split_parts_without_shift(two, binary):
    rep, _ = represent(el(two, Fraction(1, 3)), binary, Policy(), two)
    inp, frp_rep = split_parts(rep)
    assert inp.is_zero()
    assert value_of(frp_rep) == Fraction(1, 3)


@pytest.mark.slow
def test_salem_empirical_representation(salem):
    alphabet = integer_alphabet(salem.field, -2, 2)
    x = el(salem, Fraction(1, 2))
    rep, _ = represent(x, alphabet, Policy(mode="empirical", max_iters=200_000), salem)
    assert verify(rep, x)


@pytest.mark.slow
@pytest.mark.parametrize("n", range(2, 21))
def test_salem_reciprocals_are_periodic(salem, n):
    alphabet = integer_alphabet(salem.field, -2, 2)
    x = el(salem, Fraction(1, n))
    rep, trace = represent(x, alphabet, Policy(mode="empirical", max_iters=1_000_000), salem)
    assert verify(rep, x)
    assert len(trace.digits) <= 1_000_000


@pytest.mark.slow
def test_golden_binary_fractions_are_periodic(golden):
    alphabet = integer_alphabet(golden.field, 0, 1)
    fractions = sorted({Fraction(p, q) for q in range(2, 31) for p in range(1, q)})
    for value in fractions:
        x = el(golden, value)
        rep, _ = represent(x, alphabet, Policy(), golden)
        assert verify(rep, x), value
        assert rep.L == 0
