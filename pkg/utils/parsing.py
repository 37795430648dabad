# utils/parsing.py
"""
Input parsing and JSON codecs.

- Polynomials: "x^4-x^3-x^2-x+1" or a JSON list, constant term first
- Rationals: "1/3", "-5/7", "0.25"
- Alphabets: "lo..hi" shorthand, inline JSON, or a JSON file
- Field elements: a rational, a JSON coefficient list, or {"coeffs": [...]}
"""

import json
import re
from fractions import Fraction
from math import lcm
from pathlib import Path
from typing import Any, Optional

import sympy
from sympy import Poly

from engines.exact_field import FieldElement, IntPolynomial, NumberField, X, construct_field
from utils.balls import CBall
from utils.errors import UsageError

RANGE_PATTERN = re.compile(r"^\s*(-?\d+)\s*\.\.\s*(-?\d+)\s*$")


def parse_rational(text: str) -> Fraction:
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError) as err:
        raise UsageError(f"not a rational number: {text!r}") from err


def parse_polynomial(text: str) -> IntPolynomial:
    text = text.strip()
    if text.startswith("["):
        try:
            coeffs = [parse_rational(c) for c in json.loads(text)]
        except json.JSONDecodeError as err:
            raise UsageError(f"bad coefficient list: {text!r}") from err
        scale = lcm(*(c.denominator for c in coeffs)) if coeffs else 1
        return IntPolynomial(tuple(int(c * scale) for c in coeffs))
    try:
        expr = sympy.sympify(text.replace("^", "**"), locals={"x": X})
        poly = Poly(expr, X)
    except (sympy.SympifyError, sympy.PolynomialError, TypeError) as err:
        raise UsageError(f"cannot parse polynomial {text!r}") from err
    if not all(c.is_Rational for c in poly.all_coeffs()):
        raise UsageError(f"polynomial {text!r} must have rational coefficients")
    coeffs = [Fraction(int(c.p), int(c.q)) for c in reversed(poly.all_coeffs())]
    scale = lcm(*(c.denominator for c in coeffs))
    return IntPolynomial(tuple(int(c * scale) for c in coeffs))


def _load_json(text: str) -> Any:
    path = Path(text)
    try:
        if not text.lstrip().startswith(("{", "[")) and path.exists():
            return json.loads(path.read_text())
        return json.loads(text)
    except (OSError, json.JSONDecodeError) as err:
        raise UsageError(f"cannot read JSON from {text!r}") from err


def element_from_json(data: Any, field: NumberField) -> FieldElement:
    if isinstance(data, dict):
        data = data.get("coeffs")
    if isinstance(data, (int, str)) and not isinstance(data, bool):
        return field.from_rational(parse_rational(str(data)))
    if not isinstance(data, list):
        raise UsageError(f"cannot read a field element from {data!r}")
    return field.element([parse_rational(str(c)) for c in data])


def parse_element(text: str, field: NumberField) -> FieldElement:
    text = text.strip()
    if text.startswith(("[", "{")):
        return element_from_json(_load_json(text), field)
    return field.from_rational(parse_rational(text))


def alphabet_from_json(data: dict, field: NumberField):
    from engines.approximation import Alphabet

    if not isinstance(data, dict) or "digits" not in data:
        raise UsageError("alphabet JSON needs a 'digits' list")
    digits = tuple(element_from_json(d, field) for d in data["digits"])
    tags = None
    if data.get("tags") is not None:
        tags = tuple(
            tuple(CBall(parse_rational(str(b["re"])), parse_rational(str(b.get("im", "0")))) for b in tag)
            for tag in data["tags"]
        )
    return Alphabet(digits, parse_rational(str(data.get("epsilon", "0"))), tags)


def parse_alphabet(text: str, field: NumberField):
    from engines.approximation import integer_alphabet

    match = RANGE_PATTERN.match(text)
    if match:
        return integer_alphabet(field, int(match.group(1)), int(match.group(2)))
    return alphabet_from_json(_load_json(text), field)


def representation_from_json(data: dict, field: Optional[NumberField] = None):
    from engines.rep_engine import Representation

    try:
        if field is None:
            field = construct_field(IntPolynomial(tuple(int(c) for c in data["minpoly"])))
        alphabet = alphabet_from_json(data["alphabet"], field)
        return Representation(field, alphabet, int(data["L"]),
                              tuple(int(i) for i in data["preperiod"]),
                              tuple(int(i) for i in data["period"]))
    except (KeyError, TypeError, ValueError) as err:
        raise UsageError(f"malformed representation JSON: {err}") from err


def parse_representation(text: str, field: Optional[NumberField] = None):
    return representation_from_json(_load_json(text), field)


def certificate_from_json(data: dict, alphabet):
    from engines.attractor import InteriorCertificate

    try:
        field = alphabet.field
        witness = tuple(element_from_json(w, field) for w in data["witness_points"])
        words = tuple(tuple(int(i) for i in w) for w in data["witness_words"])
        return InteriorCertificate(int(data["n"]), parse_rational(str(data["rho"])), alphabet,
                                   witness, words, parse_rational(str(data.get("slack", "0"))))
    except (KeyError, TypeError) as err:
        raise UsageError(f"malformed certificate JSON: {err}") from err


def parse_certificate(text: str, alphabet):
    return certificate_from_json(_load_json(text), alphabet)
