# tests/test_parsing.py
import json
from fractions import Fraction

import pytest

from engines.approximation import integer_alphabet
from engines.attractor import origin_interior_certificate
from engines.rep_engine import Policy, represent
from utils.errors import UsageError
from utils.parsing import (
    parse_alphabet,
    parse_certificate,
    parse_element,
    parse_polynomial,
    parse_rational,
    parse_representation,
)


def test_parse_rational():
    assert parse_rational("-5/7") == Fraction(-5, 7)
    assert parse_rational("0.25") == Fraction(1, 4)
    with pytest.raises(UsageError):
        parse_rational("five")


def test_parse_polynomial_forms():
    assert parse_polynomial("x^2-x-1").coefficients == (-1, -1, 1)
    assert parse_polynomial("[-1, -1, 1]").coefficients == (-1, -1, 1)
    assert parse_polynomial("x - 3/2").coefficients == (-3, 2)
    with pytest.raises(UsageError):
        parse_polynomial("x^2 - sqrt(2)")
    with pytest.raises(UsageError):
        parse_polynomial("x^^2")


def test_parse_element(golden):
    assert parse_element("1/3", golden.field) == Fraction(1, 3)
    assert parse_element("[0, 1]", golden.field) == golden.field.beta
    assert parse_element('{"coeffs": ["1/2", "-1"]}', golden.field) == golden.field.element([Fraction(1, 2), -1])


def test_parse_alphabet(golden):
    assert parse_alphabet("-2..2", golden.field) == integer_alphabet(golden.field, -2, 2)
    text = json.dumps(integer_alphabet(golden.field, 0, 1).to_json())
    assert parse_alphabet(text, golden.field).digits == integer_alphabet(golden.field, 0, 1).digits
    with pytest.raises(UsageError):
        parse_alphabet('{"epsilon": "0"}', golden.field)


def test_alphabet_file(tmp_path, golden):
    path = tmp_path / "alphabet.json"
    path.write_text(json.dumps({"digits": [{"coeffs": ["0", "0"]}, {"coeffs": ["1", "0"]}]}))
    assert len(parse_alphabet(str(path), golden.field)) == 2


def test_representation_json_round_trip(golden):
    alphabet = integer_alphabet(golden.field, -1, 1)
    rep, _ = represent(golden.field.from_rational(Fraction(2, 3)), alphabet, Policy(), golden)
    again = parse_representation(json.dumps(rep.to_json()))
    assert (again.L, again.preperiod, again.period) == (rep.L, rep.preperiod, rep.period)
    assert again.field == golden.field
    with pytest.raises(UsageError):
        parse_representation('{"minpoly": [-1, -1, 1]}')


def test_certificate_json_round_trip(two):
    alphabet = integer_alphabet(two.field, -1, 1)
    cert = origin_interior_certificate(two, alphabet)
    again = parse_certificate(json.dumps(cert.to_json()), alphabet)
    assert again == cert
