# tests/test_places.py
from fractions import Fraction

import random

import pytest

from engines.exact_field import construct_field
from engines.places import (
    ModulusClass,
    PlaceKind,
    beta_norm,
    classify_base,
    eval_embedding,
    isolate_roots,
    padic_abs,
    padic_valuation,
    rational_base_system,
    rep_constant,
    unit_circle_root_count,
)
from engines.approximation import integer_alphabet
from utils.errors import NotExpandingPlace, UsageError
from utils.parsing import parse_polynomial

from conftest import make_system


LEHMER = "x^10+x^9-x^7-x^6-x^5-x^4-x^3+x+1"


def test_isolate_golden_roots(config):
    field = construct_field(parse_polynomial("x^2-x-1"))
    balls = isolate_roots(field, Fraction(1, 10**10), config)
    centres = sorted(float(b.ball.re) for b in balls)
    assert centres[0] == pytest.approx(-0.6180339887, abs=1e-9)
    assert centres[1] == pytest.approx(1.6180339887, abs=1e-9)
    assert all(b.radius <= Fraction(1, 10**10) for b in balls)


def test_isolate_linear_root_is_exact(config):
    balls = isolate_roots(construct_field(parse_polynomial("x-2")), Fraction(1, 100), config)
    assert len(balls) == 1
    assert balls[0].ball.re == 2 and balls[0].radius == 0


def test_isolate_rejects_nonpositive_radius(config):
    with pytest.raises(UsageError):
        isolate_roots(construct_field(parse_polynomial("x^2-x-1")), 0, config)


def test_salem_root_layout(salem):
    assert salem.unit_count == 2
    assert salem.self_reciprocal
    classes = sorted(c.value for c in salem.root_classes)
    assert classes.count(ModulusClass.UNIT.value) == 2
    beta = salem.roots[salem.distinguished].ball
    assert float(beta.re) == pytest.approx(1.7220838, abs=1e-6)
    kinds = [p.kind for p in salem.places]
    assert kinds[0] is PlaceKind.REAL
    assert kinds.count(PlaceKind.REAL) == 2 and kinds.count(PlaceKind.COMPLEX) == 1


def test_unit_circle_count_is_exact():
    assert unit_circle_root_count(parse_polynomial("x^4-x^3-x^2-x+1")) == 2
    assert unit_circle_root_count(parse_polynomial("x^2-x-1")) == 0


@pytest.mark.parametrize(
    "text, label",
    [
        ("x^2-x-1", "Pisot"),
        ("x^4-x^3-x^2-x+1", "Salem"),
        ("x^3-x-1", "Pisot"),
        (LEHMER, "Salem"),
        ("x^2-5", "expandingOther"),
        ("x^2+2*x+2", "complexPisot"),
        ("x-2", "rationalInteger"),
        ("2*x-3", "rationalNonInteger"),
        ("x^2-3", "expandingOther"),
    ],
)
def test_classify_base(config, text, label):
    ps = make_system(text, config)
    assert classify_base(ps.field, ps).label == label


def test_s_beta_views(golden, salem, gaussian, three_halves):
    assert len(golden.s_beta) == 1
    assert len(salem.s_beta) == 2
    assert len(salem.unit_places) == 1
    assert len(gaussian.s_beta) == 1 and not gaussian.s_beta[0].is_real
    finite = three_halves.finite_s_beta
    assert len(finite) == 1 and finite[0].prime == 2


def test_eval_embedding_of_beta(golden):
    value = eval_embedding(golden.field.beta, golden)
    lows = sorted(float(value.abs_bounds(p.index)[0]) for p in golden.places)
    assert lows[0] == pytest.approx(0.6180339887, abs=1e-9)
    assert lows[1] == pytest.approx(1.6180339887, abs=1e-9)


def test_rationals_embed_as_themselves(salem):
    value = eval_embedding(salem.field.one(), salem)
    for place in salem.places:
        assert value.abs_bounds(place.index)[0] <= 1 <= value.abs_bounds(place.index)[1]


def test_padic_absolute_value(three_halves):
    place = three_halves.finite_s_beta[0]
    x = three_halves.field.from_rational(Fraction(3, 2))
    assert three_halves.place_abs(x, place, 0) == (2, 2)
    assert padic_valuation(Fraction(12), 2) == 2
    assert padic_valuation(Fraction(0), 5) is None
    assert padic_abs(Fraction(1, 4), 2) == 4


def test_beta_norm(salem):
    assert beta_norm(salem.field.zero(), salem) == (0, 0)
    lo, hi = beta_norm(salem.field.one(), salem)
    assert lo <= 1 <= hi
    lo, hi = beta_norm(salem.field.beta, salem)
    assert float(lo) == pytest.approx(1.7220838, abs=1e-6)
    assert hi - lo < Fraction(1, 10**6)


def test_rep_constant_examples(two, golden, salem):
    digits = integer_alphabet(two.field, 0, 1).digits
    assert rep_constant(two, digits, two.places[0]) == 1
    phi = rep_constant(golden, integer_alphabet(golden.field, -1, 1).digits, golden.places[0])
    assert float(phi) == pytest.approx(1.6180, abs=1e-3)
    salem_c = rep_constant(salem, integer_alphabet(salem.field, -2, 2).digits, salem.places[0])
    assert float(salem_c) == pytest.approx(2.7696, abs=1e-3)


def test_rep_constant_needs_an_expanding_place(golden):
    contracting = [p for p in golden.places if p.modulus_class is ModulusClass.CONTRACTING][0]
    with pytest.raises(NotExpandingPlace):
        rep_constant(golden, [golden.field.one()], contracting)


def test_rational_base_system(config):
    ps = rational_base_system(5, 3, config)
    assert [p.kind for p in ps.places] == [PlaceKind.REAL, PlaceKind.FINITE]
    assert ps.places[1].prime == 3


def test_root_index_out_of_range(config):
    with pytest.raises(UsageError):
        make_system("x^2-x-1", config, root_index=5)


def test_contracting_root_cannot_be_the_base(config):
    with pytest.raises(UsageError):
        make_system("x^2-x-1", config, root_index=0)


@pytest.mark.parametrize("text", ["x^2+2*x+2", "x^3-x-1", "x^4-x^3-x^2-x+1", LEHMER])
def test_archimedean_weights_sum_to_the_degree(config, text):
    ps = make_system(text, config)
    archimedean = [p for p in ps.places if p.is_archimedean]
    assert sum(p.weight for p in archimedean) == ps.field.degree
    covered = [p.root_index for p in archimedean] + [p.conjugate_index for p in archimedean
                                                     if p.kind is PlaceKind.COMPLEX]
    assert sorted(covered) == list(range(ps.field.degree))


def test_complex_pisot_has_one_place(gaussian):
    assert len(gaussian.places) == 1
    assert gaussian.places[0].kind is PlaceKind.COMPLEX


@pytest.mark.parametrize("text", ["x^2-x-1", "x^2+2*x+2", "x^4-x^3-x^2-x+1"])
def test_refined_root_balls_shrink_and_nest(config, text):
    ps = make_system(text, config)
    ladder = [64, 128, 256, 512]
    for coarse_bits, fine_bits in zip(ladder, ladder[1:]):
        coarse, fine = ps.roots_at(coarse_bits), ps.roots_at(fine_bits)
        for c, f in zip(coarse, fine):
            assert f.radius < c.radius
            assert f.ball.inside(c.ball, 2 * fine_bits)


@pytest.mark.parametrize("text", ["x^2-x-1", "x^4-x^3-x^2-x+1", "x^2+2*x+2"])
def test_place_absolute_values_are_submultiplicative(config, text):
    ps = make_system(text, config)
    rng = random.Random(11)
    for _ in range(40):
        x = ps.field.random_element(rng, 5, 4)
        y = ps.field.random_element(rng, 5, 4)
        xy = x * y
        for place in ps.places:
            _, hi = ps.place_abs(xy, place, 256)
            assert hi <= ps.place_abs(x, place, 64)[1] * ps.place_abs(y, place, 64)[1]
        assert beta_norm(xy, ps, 256)[1] <= beta_norm(x, ps, 64)[1] * beta_norm(y, ps, 64)[1]
