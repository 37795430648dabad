# engines/exact_field.py
"""
EXACT FIELD
===========
RESPONSIBILITY: Exact arithmetic in Q(beta) = Q[x]/(m(x)).

PURPOSE:
- Holds integer polynomials and the number field they define
- Verifies irreducibility (modular factorization, then full factorization)
- Provides FieldElement, the exact, hashable state every engine runs on

REPRESENTATION:
- A FieldElement stores integer numerators (constant term first) over one
  positive common denominator, fully reduced. Equal elements therefore have
  identical keys, which the representation engine uses for cycle detection.
- Algebraic-integer bases reduce by the monic minimal polynomial.
- Degree-1 fields double as the rational-base mode: m(x) = t*x - s with
  beta = s/t, and elements are plain rationals.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import gcd, lcm
from typing import Iterable, Optional, Sequence

import sympy
from sympy import Poly, QQ, Symbol

from utils.errors import (
    DivisionByZero,
    FieldMismatch,
    IrreducibilityUndetermined,
    NotMonic,
    Reducible,
    UsageError,
)
from utils.logger import log_debug

X = Symbol("x")

# Config
MAX_FACTOR_DEGREE = 12
MODULAR_PRIMES = 10


# -------------------------------------------------------------------------
#  POLYNOMIALS
# -------------------------------------------------------------------------
@dataclass(frozen=True)
class IntPolynomial:
    coefficients: tuple[int, ...]  # constant term first

    def __post_init__(self):
        coeffs = list(self.coefficients)
        while len(coeffs) > 1 and coeffs[-1] == 0:
            coeffs.pop()
        object.__setattr__(self, "coefficients", tuple(int(c) for c in coeffs) or (0,))

    @classmethod
    def from_sympy(cls, poly: Poly) -> "IntPolynomial":
        return cls(tuple(int(c) for c in reversed(poly.all_coeffs())))

    @property
    def degree(self) -> int:
        if self.coefficients == (0,):
            return -1
        return len(self.coefficients) - 1

    @property
    def leading(self) -> int:
        return self.coefficients[-1]

    @property
    def is_monic(self) -> bool:
        return self.leading == 1

    def reciprocal(self) -> "IntPolynomial":
        return IntPolynomial(tuple(reversed(self.coefficients)))

    def is_self_reciprocal(self) -> bool:
        """m(x) = +-x^d m(1/x), compared coefficient by coefficient."""
        rev = self.reciprocal().coefficients
        if rev == self.coefficients:
            return True
        return tuple(-c for c in rev) == self.coefficients

    def negated_variable(self) -> "IntPolynomial":
        """(-1)^d m(-x), monic again when m is."""
        sign = -1 if self.degree % 2 else 1
        return IntPolynomial(tuple(sign * c * (-1) ** k for k, c in enumerate(self.coefficients)))

    def to_sympy(self) -> Poly:
        return Poly(list(reversed(self.coefficients)), X)

    def __str__(self) -> str:
        return str(self.to_sympy().as_expr()).replace("**", "^")


# -------------------------------------------------------------------------
#  NUMBER FIELD
# -------------------------------------------------------------------------
@dataclass(frozen=True)
class NumberField:
    min_poly: IntPolynomial
    certificate: str = field(default="", compare=False)
    root_selector: Optional[int] = field(default=None, compare=False)

    @property
    def degree(self) -> int:
        return self.min_poly.degree

    @property
    def is_rational_mode(self) -> bool:
        return self.degree == 1

    @cached_property
    def rational_beta(self) -> Fraction:
        """beta itself when the field is Q (degree 1)."""
        c0, c1 = self.min_poly.coefficients
        return Fraction(-c0, c1)

    @cached_property
    def reduction(self) -> tuple[int, ...]:
        """Coefficients of m below the leading one (monic fields)."""
        return self.min_poly.coefficients[:-1]

    def element(self, coeffs: Sequence) -> "FieldElement":
        values = [Fraction(c) for c in coeffs]
        if len(values) > self.degree:
            raise UsageError(f"expected at most {self.degree} coordinates, got {len(values)}")
        values += [Fraction(0)] * (self.degree - len(values))
        den = lcm(*(v.denominator for v in values))
        return FieldElement(self, tuple(int(v * den) for v in values), den)

    def from_rational(self, q) -> "FieldElement":
        return self.element([Fraction(q)])

    def zero(self) -> "FieldElement":
        return FieldElement(self, (0,) * self.degree, 1)

    def one(self) -> "FieldElement":
        return self.from_rational(1)

    @cached_property
    def beta(self) -> "FieldElement":
        if self.is_rational_mode:
            return self.from_rational(self.rational_beta)
        return self.element([0, 1])

    @cached_property
    def beta_inverse(self) -> "FieldElement":
        return self.one() / self.beta

    def beta_power(self, k: int) -> "FieldElement":
        base = self.beta if k >= 0 else self.beta_inverse
        out = self.one()
        for _ in range(abs(k)):
            out = out * base
        return out

    def random_element(self, rng, height: int, max_den: int = 1) -> "FieldElement":
        coeffs = [Fraction(rng.randint(-height, height), rng.randint(1, max_den))
                  for _ in range(self.degree)]
        return self.element(coeffs)


# -------------------------------------------------------------------------
#  FIELD ELEMENT
# -------------------------------------------------------------------------
class FieldElement:
    __slots__ = ("field", "num", "den", "_hash")

    def __init__(self, field: NumberField, num: tuple[int, ...], den: int):
        if den == 0:
            raise DivisionByZero("zero denominator")
        if den < 0:
            num, den = tuple(-n for n in num), -den
        g = gcd(den, *num)
        if g > 1:
            num, den = tuple(n // g for n in num), den // g
        self.field = field
        self.num = num
        self.den = den
        self._hash = None

    # -- canonical form ---------------------------------------------------
    @property
    def key(self) -> tuple:
        return (self.num, self.den)

    @property
    def coeffs(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(n, self.den) for n in self.num)

    def is_zero(self) -> bool:
        return not any(self.num)

    def is_rational(self) -> bool:
        return not any(self.num[1:])

    def rational_value(self) -> Fraction:
        if not self.is_rational():
            raise ValueError("element is not rational")
        return Fraction(self.num[0], self.den)

    def __eq__(self, other) -> bool:
        if isinstance(other, FieldElement):
            return self.field == other.field and self.key == other.key
        if isinstance(other, (int, Fraction)):
            return self.is_rational() and self.rational_value() == other
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            # rational elements compare equal to int and Fraction, so they hash alike
            self._hash = hash(self.rational_value()) if self.is_rational() else hash(self.key)
        return self._hash

    def __repr__(self) -> str:
        return f"FieldElement({[str(c) for c in self.coeffs]})"

    def __str__(self) -> str:
        terms = []
        for k, c in enumerate(self.coeffs):
            if c == 0:
                continue
            power = "" if k == 0 else ("b" if k == 1 else f"b^{k}")
            if not power:
                terms.append(str(c))
            elif c == 1:
                terms.append(power)
            else:
                terms.append(f"({c})*{power}")
        return " + ".join(terms) or "0"

    # -- arithmetic -------------------------------------------------------
    def _coerce(self, other) -> "FieldElement":
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise FieldMismatch("elements live in different fields")
            return other
        if isinstance(other, (int, Fraction)):
            return self.field.from_rational(other)
        raise TypeError(f"cannot combine FieldElement with {type(other).__name__}")

    def __add__(self, other) -> "FieldElement":
        other = self._coerce(other)
        den = self.den * other.den // gcd(self.den, other.den)
        a, b = den // self.den, den // other.den
        return FieldElement(self.field, tuple(a * x + b * y for x, y in zip(self.num, other.num)), den)

    __radd__ = __add__

    def __neg__(self) -> "FieldElement":
        return FieldElement(self.field, tuple(-n for n in self.num), self.den)

    def __sub__(self, other) -> "FieldElement":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "FieldElement":
        return self._coerce(other) - self

    def __mul__(self, other) -> "FieldElement":
        other = self._coerce(other)
        d = self.field.degree
        if d == 1:
            return FieldElement(self.field, (self.num[0] * other.num[0],), self.den * other.den)
        prod = [0] * (2 * d - 1)
        for i, x in enumerate(self.num):
            if x:
                for j, y in enumerate(other.num):
                    prod[i + j] += x * y
        m = self.field.reduction
        for k in range(2 * d - 2, d - 1, -1):
            top = prod[k]
            if top:
                base = k - d
                for i in range(d):
                    prod[base + i] -= top * m[i]
        return FieldElement(self.field, tuple(prod[:d]), self.den * other.den)

    __rmul__ = __mul__

    def mul_beta(self) -> "FieldElement":
        """beta * self; a shift plus one reduction step for monic fields."""
        if self.field.is_rational_mode:
            return self * self.field.rational_beta
        top = self.num[-1]
        m = self.field.reduction
        shifted = (0,) + self.num[:-1]
        return FieldElement(self.field, tuple(s - top * c for s, c in zip(shifted, m)), self.den)

    def inverse(self) -> "FieldElement":
        if self.is_zero():
            raise DivisionByZero("inverse of zero")
        if self.field.is_rational_mode:
            return self.field.from_rational(1 / self.rational_value())
        f = Poly(list(reversed(self.coeffs)), X, domain=QQ)
        g = Poly(list(reversed(self.field.min_poly.coefficients)), X, domain=QQ)
        inv = f.invert(g)
        coeffs = [Fraction(int(c.p), int(c.q)) for c in reversed(inv.all_coeffs())]
        return self.field.element(coeffs)

    def __truediv__(self, other) -> "FieldElement":
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other) -> "FieldElement":
        return self._coerce(other) * self.inverse()

    def __pow__(self, k: int) -> "FieldElement":
        base = self if k >= 0 else self.inverse()
        out, k = self.field.one(), abs(k)
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def trace(self) -> Fraction:
        """Exact trace via the companion matrix of multiplication by self."""
        return sum(self._companion_column(i)[i] for i in range(self.field.degree))

    def norm(self) -> Fraction:
        matrix = sympy.Matrix([[sympy.Rational(c.numerator, c.denominator)
                                for c in self._companion_column(i)]
                               for i in range(self.field.degree)])
        det = matrix.det()
        return Fraction(int(det.p), int(det.q))

    def _companion_column(self, i: int) -> tuple[Fraction, ...]:
        basis = self.field.element([0] * i + [1])
        return (self * basis).coeffs

    def to_json(self) -> dict:
        return {"coeffs": [str(c) for c in self.coeffs]}


# -------------------------------------------------------------------------
#  CONSTRUCTION
# -------------------------------------------------------------------------
def _factor_degrees_mod(poly: Poly, p: int) -> Optional[list[int]]:
    """Degrees of the irreducible factors of poly mod p, None if p is bad."""
    reduced = Poly(poly.as_expr(), X, modulus=p)
    if reduced.degree() != poly.degree():
        return None
    _, factors = reduced.factor_list()
    if any(mult > 1 for _, mult in factors):
        return None
    return [f.degree() for f, _ in factors]


def _subset_sums(degrees: Iterable[int]) -> set[int]:
    sums = {0}
    for d in degrees:
        sums |= {s + d for s in sums}
    return sums


def check_irreducible(min_poly: IntPolynomial) -> str:
    """Return a short certificate string or raise Reducible / IrreducibilityUndetermined."""
    d = min_poly.degree
    if d == 1:
        return "linear"
    poly = min_poly.to_sympy()
    possible = set(range(d + 1))
    tried = 0
    for p in sympy.primerange(2, 10_000):
        if tried >= MODULAR_PRIMES:
            break
        degrees = _factor_degrees_mod(poly, p)
        if degrees is None:
            continue
        tried += 1
        if degrees == [d]:
            return f"irreducible mod {p}"
        possible &= _subset_sums(degrees)
        if possible == {0, d}:
            return f"degree patterns up to mod {p}"
    if d > MAX_FACTOR_DEGREE:
        raise IrreducibilityUndetermined(
            f"degree {d} exceeds the factorization budget ({MAX_FACTOR_DEGREE})"
        )
    _, factors = sympy.factor_list(poly.as_expr(), X)
    nontrivial = [(f, mult) for f, mult in factors if Poly(f, X).degree() > 0]
    if len(nontrivial) == 1 and nontrivial[0][1] == 1:
        return "factorization over Z"
    witness = IntPolynomial.from_sympy(Poly(nontrivial[0][0], X))
    raise Reducible(witness, f"{min_poly} has the factor {witness}")


def construct_field(min_poly: IntPolynomial, root_selector: Optional[int] = None) -> NumberField:
    if min_poly.degree < 1:
        raise UsageError("minimal polynomial must be nonconstant")
    if min_poly.degree == 1:
        c0, c1 = min_poly.coefficients
        if c1 < 0:
            min_poly = IntPolynomial((-c0, -c1))
        if gcd(*min_poly.coefficients) != 1:
            g = gcd(*min_poly.coefficients)
            min_poly = IntPolynomial(tuple(c // g for c in min_poly.coefficients))
        if abs(Fraction(-min_poly.coefficients[0], min_poly.coefficients[1])) <= 1:
            raise UsageError("rational base must satisfy |s/t| > 1")
    elif not min_poly.is_monic:
        raise NotMonic(f"{min_poly} is not monic; only algebraic integers (or degree 1) are supported")
    certificate = check_irreducible(min_poly)
    log_debug(f"[Field] {min_poly}: {certificate}")
    return NumberField(min_poly, certificate, root_selector)


def rational_base_field(s: int, t: int) -> NumberField:
    """The degree-1 field with beta = s/t."""
    return construct_field(IntPolynomial((-s, t)))


def arith(op: str, x: FieldElement, y: FieldElement) -> FieldElement:
    if x.field != y.field:
        raise FieldMismatch("elements live in different fields")
    if op == "add":
        return x + y
    if op == "sub":
        return x - y
    if op == "mul":
        return x * y
    if op == "div":
        return x / y
    raise UsageError(f"unknown operation {op!r}")


def denominator_bound(x: FieldElement) -> int:
    """lcm of the coordinate denominators (the common denominator)."""
    return x.den
