# engines/places.py
"""
PLACES
======
RESPONSIBILITY: Certified conjugates of beta and the place system S_beta.

PURPOSE:
- Isolates every root of the minimal polynomial in a certified ball
- Picks the distinguished root (beta itself) and classifies the base
- Builds the places of Q(beta): one per real root, one per conjugate pair,
  plus the primes p | t when beta = s/t is rational
- Evaluates the diagonal embedding and the norm |x|_beta with certified balls

FLOW:
1. sympy isolates the roots (CRootOf) and refines them to any precision
2. Unit-circle membership is decided exactly (self-reciprocity + trace polynomial)
3. Remaining roots are split into expanding / contracting by refining balls
4. Embeddings evaluate the coefficient vector against cached root powers

USAGE:
- build_place_system(field) is the entry point for every other engine
"""

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence, Union

import sympy
from sympy import Poly

from engines.exact_field import FieldElement, IntPolynomial, NumberField, rational_base_field
from utils.balls import CBall, ZERO, to_fraction
from utils.config import DEFAULT_CONFIG, Config
from utils.errors import NotExpandingPlace, PrecisionExhausted, UsageError
from utils.logger import log_debug

ONE = Fraction(1)


class PlaceKind(str, Enum):
    REAL = "archimedean-real"
    COMPLEX = "archimedean-complex"
    FINITE = "finite-rational-prime"


class ModulusClass(str, Enum):
    EXPANDING = "expanding"
    UNIT = "unit"
    CONTRACTING = "contracting"


@dataclass(frozen=True)
class RootBall:
    ball: CBall
    is_real: bool

    @property
    def center(self) -> complex:
        return self.ball.as_complex()

    @property
    def radius(self) -> Fraction:
        return self.ball.rad

    def to_json(self) -> dict:
        return self.ball.to_json()


@dataclass(frozen=True)
class Place:
    index: int
    kind: PlaceKind
    modulus_class: ModulusClass
    root_index: Optional[int] = None
    conjugate_index: Optional[int] = None
    prime: Optional[int] = None
    valuation: int = 0  # nu_p(t) for finite places

    @property
    def is_archimedean(self) -> bool:
        return self.kind is not PlaceKind.FINITE

    @property
    def is_real(self) -> bool:
        return self.kind is PlaceKind.REAL

    @property
    def weight(self) -> int:
        """Exponent of this place in the product formula."""
        return 2 if self.kind is PlaceKind.COMPLEX else 1

    def label(self) -> str:
        if self.kind is PlaceKind.FINITE:
            return f"p={self.prime}"
        return f"root{self.root_index}"


@dataclass(frozen=True)
class BaseClass:
    label: str
    expanding: int
    unit: int
    contracting: int
    self_reciprocal: bool = False

    def to_json(self) -> dict:
        return {"class": self.label, "expanding": self.expanding,
                "unit": self.unit, "contracting": self.contracting}


PlaceValue = Union[CBall, Fraction]


@dataclass(frozen=True)
class CertifiedValue:
    values: dict  # place index -> CBall (archimedean) or exact |x|_p (finite)
    bits: int

    def abs_bounds(self, place_index: int) -> tuple[Fraction, Fraction]:
        value = self.values[place_index]
        if isinstance(value, CBall):
            return value.abs_bounds(self.bits)
        return value, value


# -------------------------------------------------------------------------
#  p-ADIC HELPERS (rational bases only)
# -------------------------------------------------------------------------
def padic_valuation(q: Fraction, p: int) -> Optional[int]:
    """nu_p(q); None stands for +infinity (q == 0)."""
    q = Fraction(q)
    if q == 0:
        return None
    v, num, den = 0, q.numerator, q.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def padic_abs(q: Fraction, p: int) -> Fraction:
    v = padic_valuation(q, p)
    if v is None:
        return ZERO
    return Fraction(1, p ** v) if v >= 0 else Fraction(p ** -v)


# -------------------------------------------------------------------------
#  ROOT ISOLATION
# -------------------------------------------------------------------------
@lru_cache(maxsize=64)
def _sympy_roots(coefficients: tuple[int, ...]) -> tuple:
    poly = IntPolynomial(coefficients).to_sympy()
    return tuple(poly.all_roots(radicals=False))


def _root_ball(root, eps: Fraction) -> RootBall:
    if root.is_Rational:
        return RootBall(CBall(to_fraction(root)), True)
    tol = sympy.Rational(eps.numerator, eps.denominator)
    approx = root.eval_rational(dx=tol, dy=tol)
    re, im = sympy.re(approx), sympy.im(approx)
    is_real = bool(root.is_real)
    # eval_rational is within eps per coordinate; balls 2+ bits apart are nested
    ball = CBall(to_fraction(re), ZERO if is_real else to_fraction(im), 2 * eps if is_real else 3 * eps)
    return RootBall(ball, is_real)


def _disjoint(balls: Sequence[RootBall]) -> bool:
    for i, a in enumerate(balls):
        for b in balls[i + 1:]:
            if a.ball.overlaps(b.ball):
                return False
    return True


def _isolate(field: NumberField, target_radius: Fraction, cap_bits: int) -> list[RootBall]:
    roots = _sympy_roots(field.min_poly.coefficients)
    eps = Fraction(target_radius) / 3
    floor = Fraction(1, 1 << cap_bits)
    while True:
        balls = [_root_ball(r, eps) for r in roots]
        if _disjoint(balls):
            return balls
        eps /= 4
        if eps < floor:
            raise PrecisionExhausted("root balls still overlap at the precision cap")


def isolate_roots(field: NumberField, target_radius, config: Config = DEFAULT_CONFIG) -> list[RootBall]:
    """d pairwise disjoint certified root balls, ordered by real then imaginary part."""
    target = to_fraction(target_radius)
    if target <= 0:
        raise UsageError("target radius must be positive")
    balls = _isolate(field, target, config.prec_max)
    return sorted(balls, key=lambda b: (b.ball.re, b.ball.im))


def trace_polynomial(min_poly: IntPolynomial) -> Poly:
    """h with m(x) = x^(d/2) h(x + 1/x) for a self-reciprocal m of even degree."""
    y = sympy.Symbol("y")
    c = min_poly.coefficients
    half = min_poly.degree // 2
    chebyshev = [sympy.Integer(2), y]
    for _ in range(2, half + 1):
        chebyshev.append(sympy.expand(y * chebyshev[-1] - chebyshev[-2]))
    expr = sympy.Integer(c[half]) + sum(c[half + k] * chebyshev[k] for k in range(1, half + 1))
    return Poly(expr, y)


def unit_circle_root_count(min_poly: IntPolynomial) -> int:
    """Exact number of roots on |z| = 1 for an irreducible m of degree >= 2."""
    if min_poly.degree < 2 or min_poly.degree % 2 or min_poly.reciprocal() != min_poly:
        return 0
    return 2 * int(trace_polynomial(min_poly).count_roots(-2, 2))


# -------------------------------------------------------------------------
#  PLACE SYSTEM
# -------------------------------------------------------------------------
class PlaceSystem:
    """Roots, places and S_beta of one field, with per-precision caches."""

    def __init__(self, field: NumberField, config: Config = DEFAULT_CONFIG, root_index: Optional[int] = None):
        self.field = field
        self.config = config
        roots = _sympy_roots(field.min_poly.coefficients)
        base = [_root_ball(r, Fraction(1, 1 << config.prec_start)) for r in roots]
        # fixed order for every later precision
        self._order = sorted(range(len(roots)), key=lambda i: (base[i].ball.re, base[i].ball.im))
        self._roots = [roots[i] for i in self._order]
        self._ball_cache: dict[int, list[RootBall]] = {}
        self._power_cache: dict[int, list[list[CBall]]] = {}
        self.unit_count = unit_circle_root_count(field.min_poly)
        self.self_reciprocal = field.min_poly.degree > 1 and field.min_poly.is_self_reciprocal()

        selector = root_index if root_index is not None else field.root_selector
        self.distinguished = self._pick_distinguished(selector)
        self.root_classes = self._classify_roots()
        if self.root_classes[self.distinguished] is not ModulusClass.EXPANDING:
            raise UsageError("the distinguished root must satisfy |beta| > 1")
        self.places = self._build_places()
        log_debug(f"[Places] {field.min_poly}: {len(self.places)} places, "
                  f"S_beta = {[p.label() for p in self.s_beta]}")

    # -- roots ---------------------------------------------------------------
    def roots_at(self, bits: int) -> list[RootBall]:
        if bits not in self._ball_cache:
            eps = Fraction(1, 1 << bits)
            self._ball_cache[bits] = [_root_ball(r, eps) for r in self._roots]
        return self._ball_cache[bits]

    @property
    def roots(self) -> list[RootBall]:
        return self.roots_at(self.config.prec_start)

    def powers_at(self, bits: int) -> list[list[CBall]]:
        if bits not in self._power_cache:
            table = []
            for rb in self.roots_at(bits):
                powers = [CBall(ONE)]
                for _ in range(1, self.field.degree):
                    powers.append(powers[-1].mul(rb.ball, bits))
                table.append(powers)
            self._power_cache[bits] = table
        return self._power_cache[bits]

    def _pick_distinguished(self, selector: Optional[int]) -> int:
        n = len(self._roots)
        if selector is not None:
            if not 0 <= selector < n:
                raise UsageError(f"root index {selector} out of range 0..{n - 1}")
            return selector
        bits = max(self.config.prec_start, 128)
        balls = self.roots_at(bits)
        bounds = [b.ball.abs_bounds(bits) for b in balls]
        top = max(range(n), key=lambda i: bounds[i][1])
        tied = [i for i in range(n) if bounds[i][1] >= bounds[top][0]]
        return max(tied, key=lambda i: (balls[i].ball.re, balls[i].ball.im))

    def _classify_roots(self) -> list[ModulusClass]:
        if self.field.is_rational_mode:
            return [ModulusClass.EXPANDING]
        for bits in self.config.precisions():
            classes, ambiguous = [], []
            for i, rb in enumerate(self.roots_at(bits)):
                lo, hi = rb.ball.abs_bounds(bits)
                if lo > ONE:
                    classes.append(ModulusClass.EXPANDING)
                elif hi < ONE:
                    classes.append(ModulusClass.CONTRACTING)
                else:
                    classes.append(None)
                    ambiguous.append(i)
            if len(ambiguous) == self.unit_count:
                return [c or ModulusClass.UNIT for c in classes]
        raise PrecisionExhausted("could not separate root moduli from 1 at the precision cap")

    def conjugate_of(self, index: int) -> int:
        rb = self.roots[index]
        if rb.is_real:
            return index
        target = CBall(rb.ball.re, -rb.ball.im)
        return min(
            (j for j in range(len(self._roots)) if j != index and not self.roots[j].is_real),
            key=lambda j: (self.roots[j].ball - target).centre_abs_bounds(64)[0],
        )

    def _build_places(self) -> list[Place]:
        places: list[Place] = []
        seen: set[int] = set()
        for i, rb in enumerate(self.roots):
            if i in seen:
                continue
            if rb.is_real:
                places.append(Place(len(places), PlaceKind.REAL, self.root_classes[i], i, i))
                seen.add(i)
                continue
            j = self.conjugate_of(i)
            rep = i
            if j == self.distinguished or (i != self.distinguished and rb.ball.im < 0):
                rep, j = j, i
            places.append(Place(len(places), PlaceKind.COMPLEX, self.root_classes[rep], rep, j))
            seen.update({rep, j})
        if self.field.is_rational_mode:
            t = self.field.min_poly.coefficients[1]
            for p, v in sorted(sympy.factorint(t).items()):
                places.append(Place(len(places), PlaceKind.FINITE, ModulusClass.EXPANDING,
                                    prime=int(p), valuation=int(v)))
        # the distinguished place goes first
        places.sort(key=lambda p: (p.root_index != self.distinguished, p.index))
        return [Place(k, p.kind, p.modulus_class, p.root_index, p.conjugate_index, p.prime, p.valuation)
                for k, p in enumerate(places)]

    # -- place views ---------------------------------------------------------
    @property
    def s_beta(self) -> list[Place]:
        return [p for p in self.places if p.modulus_class is not ModulusClass.CONTRACTING]

    @property
    def archimedean_s_beta(self) -> list[Place]:
        return [p for p in self.s_beta if p.is_archimedean]

    @property
    def finite_s_beta(self) -> list[Place]:
        return [p for p in self.s_beta if not p.is_archimedean]

    @property
    def unit_places(self) -> list[Place]:
        return [p for p in self.places if p.modulus_class is ModulusClass.UNIT]

    @property
    def expanding_places(self) -> list[Place]:
        return [p for p in self.places if p.modulus_class is ModulusClass.EXPANDING]

    @property
    def identity_place(self) -> Place:
        return self.places[0]

    def has_unit_places(self) -> bool:
        return bool(self.unit_places)

    # -- evaluation ----------------------------------------------------------
    def embed(self, x: FieldElement, place: Place, bits: int) -> PlaceValue:
        if not place.is_archimedean:
            return padic_abs(x.rational_value(), place.prime)
        powers = self.powers_at(bits)[place.root_index]
        acc = CBall(ZERO)
        for n, pw in zip(x.num, powers):
            if n:
                acc = acc + pw.scale(Fraction(n))
        return acc.scale(Fraction(1, x.den)).rounded(bits)

    def place_abs(self, x: FieldElement, place: Place, bits: int) -> tuple[Fraction, Fraction]:
        value = self.embed(x, place, bits)
        if isinstance(value, CBall):
            return value.abs_bounds(bits)
        return value, value

    def beta_abs(self, place: Place, bits: int) -> tuple[Fraction, Fraction]:
        if not place.is_archimedean:
            value = Fraction(place.prime ** place.valuation)
            return value, value
        return self.roots_at(bits)[place.root_index].ball.abs_bounds(bits)

    def coordinates(self, x: FieldElement, bits: int, places: Optional[Sequence[Place]] = None) -> list[CBall]:
        """Archimedean coordinates of x in K_beta (S_beta places by default)."""
        places = self.archimedean_s_beta if places is None else places
        return [self.embed(x, p, bits) for p in places]

    def to_json(self) -> dict:
        return {
            "minpoly": list(self.field.min_poly.coefficients),
            "roots": [rb.to_json() for rb in self.roots],
            "distinguished": self.distinguished,
            "places": [
                {"kind": p.kind.value, "class": p.modulus_class.value,
                 **({"prime": p.prime} if p.prime else {"root": p.root_index})}
                for p in self.places
            ],
        }


def build_place_system(field: NumberField, config: Config = DEFAULT_CONFIG,
                       root_index: Optional[int] = None) -> PlaceSystem:
    return PlaceSystem(field, config, root_index)


# -------------------------------------------------------------------------
#  OPERATIONS
# -------------------------------------------------------------------------
def classify_base(field: NumberField, place_system: PlaceSystem) -> BaseClass:
    ps = place_system
    counts = {c: ps.root_classes.count(c) for c in ModulusClass}
    expanding, unit, contracting = (counts[ModulusClass.EXPANDING], counts[ModulusClass.UNIT],
                                    counts[ModulusClass.CONTRACTING])
    if field.is_rational_mode:
        label = "rationalInteger" if field.rational_beta.denominator == 1 else "rationalNonInteger"
        return BaseClass(label, expanding, unit, contracting)

    dist = ps.distinguished
    beta_ball = ps.roots[dist]
    exempt = {dist, ps.conjugate_of(dist)}
    others = [i for i in range(field.degree) if i not in exempt]
    extra_expanding = sum(ps.root_classes[i] is ModulusClass.EXPANDING for i in others)
    extra_unit = sum(ps.root_classes[i] is ModulusClass.UNIT for i in others)

    if extra_expanding:
        label = "expandingOther"
    elif beta_ball.is_real and beta_ball.ball.re > 0:
        label = "Salem" if extra_unit else "Pisot"
    elif not beta_ball.is_real:
        label = "complexSalem" if extra_unit else "complexPisot"
    else:
        label = "other"
    return BaseClass(label, expanding, unit, contracting, ps.self_reciprocal)


def eval_embedding(x: FieldElement, place_system: PlaceSystem,
                   places: Optional[Sequence[Place]] = None, precision: Optional[int] = None) -> CertifiedValue:
    bits = precision or place_system.config.prec_start
    places = place_system.places if places is None else places
    return CertifiedValue({p.index: place_system.embed(x, p, bits) for p in places}, bits)


def beta_norm(x: FieldElement, place_system: PlaceSystem, precision: Optional[int] = None) -> tuple[Fraction, Fraction]:
    """Certified interval for |x|_beta = max over S_beta of |x|_p."""
    bits = precision or place_system.config.prec_start
    lo, hi = ZERO, ZERO
    for place in place_system.s_beta:
        l, h = place_system.place_abs(x, place, bits)
        lo, hi = max(lo, l), max(hi, h)
    return lo, hi


def rep_constant(place_system: PlaceSystem, digits: Sequence[FieldElement], place: Place,
                 precision: Optional[int] = None) -> Fraction:
    """Certified upper bound of C(beta, A, p) = max |a|_p / (|beta|_p - 1)."""
    if place.modulus_class is not ModulusClass.EXPANDING:
        raise NotExpandingPlace(f"place {place.label()} is not expanding")
    start = precision or place_system.config.prec_start
    for bits in place_system.config.precisions():
        if bits < start:
            continue
        beta_lo, _ = place_system.beta_abs(place, bits)
        if beta_lo > ONE:
            top = max((place_system.place_abs(a, place, bits)[1] for a in digits), default=ZERO)
            return top / (beta_lo - 1)
    raise PrecisionExhausted("|beta|_p could not be separated from 1")


def rational_base_system(s: int, t: int, config: Config = DEFAULT_CONFIG) -> PlaceSystem:
    """Place system of the rational base beta = s/t: the real place plus every p | t."""
    return build_place_system(rational_base_field(s, t), config)
