# engines/approximation.py
"""
APPROXIMATION
=============
RESPONSIBILITY: Weak approximation in K_beta and digit alphabets.

PURPOSE:
- weak_approximate: find z in Q(beta) close to prescribed values at every
  archimedean place of S_beta (Vandermonde solve, rational rounding)
- suggest_alphabet: build an alphabet (guaranteed cover, complex-Pisot bound,
  or a plain integer range)
- validate_cover: certify beta*D_1 is covered by D_1 + a, a in the alphabet

FLOW (guaranteed mode):
1. One cover per place: integers / integer lattice at expanding places,
   {0} plus a hexagon ring at unit places, residues at finite places
2. Cartesian product of the per-place covers gives the target tags
3. Every tag is realised by weak_approximate with error epsilon = delta / 2
4. validate_cover re-checks each place and every tag error
"""

import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import mpmath

from engines.exact_field import FieldElement, NumberField
from engines.places import ModulusClass, Place, PlaceSystem
from utils.balls import CBall, ZERO, to_fraction
from utils.errors import (
    AlphabetError,
    DenominatorCapExceeded,
    MemoryBudgetExceeded,
    PrecisionExhausted,
    UsageError,
)
from utils.geometry import RegionPart, covering_radius, exact_covering_radius_1d
from utils.logger import log_debug

ONE = Fraction(1)
# rational lower bounds of cos(pi/3), sin(pi/3)
HEX_COS = Fraction(1, 2)
HEX_SIN = Fraction(86602, 100000)

MODES = ("guaranteed", "complex-pisot-bound", "integer-range")
VERDICTS = ("certified", "indeterminate", "refuted")


@dataclass(frozen=True)
class Alphabet:
    digits: tuple[FieldElement, ...]
    epsilon: Fraction = ZERO
    # per digit: one target CBall per archimedean place of S_beta
    cover_tags: Optional[tuple[tuple[CBall, ...], ...]] = None

    def __post_init__(self):
        if not self.digits:
            raise AlphabetError("alphabet is empty")
        if len(set(self.digits)) != len(self.digits):
            raise AlphabetError("alphabet digits must be distinct")
        if self.cover_tags is not None and len(self.cover_tags) != len(self.digits):
            raise AlphabetError("one cover tag per digit expected")
        if self.epsilon < 0:
            raise AlphabetError("epsilon must be nonnegative")

    def __len__(self) -> int:
        return len(self.digits)

    def __iter__(self):
        return iter(self.digits)

    def __getitem__(self, i: int) -> FieldElement:
        return self.digits[i]

    @property
    def field(self) -> NumberField:
        return self.digits[0].field

    @property
    def denominator(self) -> int:
        return math.lcm(*(d.den for d in self.digits))

    def index(self, digit: FieldElement) -> int:
        return self.digits.index(digit)

    def contains_zero(self) -> bool:
        return any(d.is_zero() for d in self.digits)

    def is_integer_range(self) -> bool:
        return all(d.is_rational() and d.den == 1 for d in self.digits)

    def differences(self) -> list[FieldElement]:
        return list({a - b for a in self.digits for b in self.digits})

    def to_json(self) -> dict:
        out = {"digits": [d.to_json() for d in self.digits], "epsilon": str(self.epsilon)}
        if self.cover_tags is not None:
            out["tags"] = [[{"re": str(b.re), "im": str(b.im)} for b in tag] for tag in self.cover_tags]
        return out


def integer_alphabet(field: NumberField, lo: int, hi: int) -> Alphabet:
    if lo > hi:
        raise AlphabetError(f"empty digit range {lo}..{hi}")
    return Alphabet(tuple(field.from_rational(k) for k in range(lo, hi + 1)))


@dataclass(frozen=True)
class CoverCertificate:
    verdict: str
    margin: Fraction  # delta*: certified lower bound of the overlap
    m_validated: Fraction = ONE
    covers: dict = field(default_factory=dict)  # place label -> cover radius upper bound
    detail: str = ""

    @property
    def certified(self) -> bool:
        return self.verdict == "certified"

    def to_json(self) -> dict:
        return {"verdict": self.verdict, "margin": str(self.margin), "m": str(self.m_validated),
                "cover_radii": {k: str(v) for k, v in self.covers.items()}, "detail": self.detail}


# -------------------------------------------------------------------------
#  WEAK APPROXIMATION
# -------------------------------------------------------------------------
def _mp(q: Fraction):
    return mpmath.mpf(q.numerator) / q.denominator


def _target_ball(target, place: Place) -> CBall:
    if isinstance(target, CBall):
        ball = target
    elif isinstance(target, complex):
        ball = CBall.exact(target.real, target.imag)
    elif isinstance(target, (tuple, list)):
        ball = CBall.exact(*target)
    else:
        ball = CBall.exact(target)
    if place.is_real and ball.im != 0:
        raise UsageError(f"real place {place.label()} needs a real target")
    return ball


def _root_targets(ps: PlaceSystem, places: Sequence[Place], balls: Sequence[CBall]) -> list[CBall]:
    """Targets per root: the place value, its conjugate, or 0 off S_beta."""
    per_root = [CBall(ZERO)] * ps.field.degree
    for place, ball in zip(places, balls):
        per_root[place.root_index] = ball
        if place.conjugate_index != place.root_index:
            per_root[place.conjugate_index] = CBall(ball.re, -ball.im)
    return per_root


def _solve_coefficients(ps: PlaceSystem, per_root: Sequence[CBall], bits: int) -> list[Fraction]:
    d = ps.field.degree
    with mpmath.workprec(bits + 32):
        roots = [mpmath.mpc(_mp(rb.ball.re), _mp(rb.ball.im)) for rb in ps.roots_at(bits)]
        matrix = mpmath.matrix(d, d)
        for j, r in enumerate(roots):
            for k in range(d):
                matrix[j, k] = r ** k
        rhs = mpmath.matrix([mpmath.mpc(_mp(t.re), _mp(t.im)) for t in per_root])
        solution = mpmath.lu_solve(matrix, rhs)
        return [to_fraction(mpmath.re(solution[k])) for k in range(d)]


def _error_below(ps: PlaceSystem, z: FieldElement, places, balls, eps: Fraction, bits: int) -> Optional[bool]:
    decided = True
    for place, target in zip(places, balls):
        lo, hi = (ps.embed(z, place, bits) - target).abs_bounds(bits)
        if lo >= eps:
            return False
        if hi >= eps:
            decided = None
    return decided


def approximation_error(ps: PlaceSystem, z: FieldElement, targets: Sequence, bits: int) -> Fraction:
    """Certified upper bound of |Phi(z) - targets|_beta over archimedean S_beta."""
    places = ps.archimedean_s_beta
    worst = ZERO
    for place, t in zip(places, targets):
        worst = max(worst, (ps.embed(z, place, bits) - _target_ball(t, place)).abs_bounds(bits)[1])
    return worst


def weak_approximate(ps: PlaceSystem, targets: Sequence, epsilon, denom_cap: Optional[int] = None) -> FieldElement:
    eps = to_fraction(epsilon)
    if eps <= 0:
        raise UsageError("epsilon must be positive")
    places = ps.archimedean_s_beta
    if len(targets) != len(places):
        raise UsageError(f"expected {len(places)} targets, got {len(targets)}")
    balls = [_target_ball(t, p) for t, p in zip(targets, places)]
    cap_limit = denom_cap or ps.config.denom_cap
    field_ = ps.field

    cap = 1
    while True:
        if all(b.im == 0 and b.re == balls[0].re for b in balls):
            z = field_.from_rational(balls[0].re.limit_denominator(cap))
            if _error_below(ps, z, places, balls, eps, ps.config.prec_start):
                return z
        outcome = None
        for bits in ps.config.precisions():
            coeffs = _solve_coefficients(ps, _root_targets(ps, places, balls), bits)
            z = field_.element([c.limit_denominator(cap) for c in coeffs])
            outcome = _error_below(ps, z, places, balls, eps, bits)
            if outcome is not None:
                break
        if outcome is None:
            raise PrecisionExhausted("approximation error could not be certified")
        if outcome:
            log_debug(f"[Approx] target met with denominator cap {cap}")
            return z
        if cap >= cap_limit:
            raise DenominatorCapExceeded(f"no approximation within {eps} up to denominator {cap_limit}")
        cap = min(cap * 16, cap_limit)


def lattice_covering_radius(ps: PlaceSystem, samples: int, rng: Optional[random.Random] = None) -> Fraction:
    """Largest distance from random targets in the unit box to Z[beta] found by integer rounding."""
    rng = rng or random.Random(ps.config.seed)
    places = ps.archimedean_s_beta
    bits = ps.config.prec_start
    worst = ZERO
    for _ in range(samples):
        balls = []
        for place in places:
            re = Fraction(rng.randint(-1000, 1000), 1000)
            im = ZERO if place.is_real else Fraction(rng.randint(-1000, 1000), 1000)
            balls.append(CBall(re, im))
        coeffs = _solve_coefficients(ps, _root_targets(ps, places, balls), bits)
        z = ps.field.element([round(c) for c in coeffs])
        worst = max(worst, approximation_error(ps, z, balls, bits))
    return worst


# -------------------------------------------------------------------------
#  ALPHABETS
# -------------------------------------------------------------------------
def _conjugate_pair(ps: PlaceSystem, bits: int) -> tuple[Fraction, Fraction, Fraction, Fraction]:
    """Bounds of beta*conj(beta) and |beta + conj(beta)|."""
    ball = ps.roots_at(bits)[ps.distinguished].ball
    lo, hi = ball.abs_bounds(bits)
    re_lo, re_hi = abs(ball.re) - ball.rad, abs(ball.re) + ball.rad
    return lo * lo, hi * hi, 2 * max(ZERO, re_lo), 2 * re_hi


def complex_pisot_bound(ps: PlaceSystem) -> int:
    """Smallest M with 2M + 1 > beta*conj(beta) + |beta + conj(beta)|."""
    field_ = ps.field
    if field_.degree == 2 and not ps.roots[ps.distinguished].is_real:
        c0, c1, _ = field_.min_poly.coefficients
        value = Fraction(c0 + abs(c1))
        return math.floor((value - 1) / 2) + 1
    if field_.is_rational_mode:
        b = field_.rational_beta
        value = b * b + 2 * abs(b)
        return math.floor((value - 1) / 2) + 1
    for bits in ps.config.precisions():
        n_lo, n_hi, t_lo, t_hi = _conjugate_pair(ps, bits)
        lo_m = math.floor((n_lo + t_lo - 1) / 2) + 1
        hi_m = math.floor((n_hi + t_hi - 1) / 2) + 1
        if lo_m == hi_m:
            return lo_m
    raise PrecisionExhausted("complex Pisot bound undecided at the precision cap")


def _real_cover(reach: Fraction, delta: Fraction) -> list[CBall]:
    k = max(0, math.ceil(reach - 1 + delta))
    return [CBall(Fraction(i)) for i in range(-k, k + 1)]


def _lattice_cover(reach: Fraction) -> list[CBall]:
    k = math.ceil(reach) + 1
    bound = (reach + 1) ** 2
    return [CBall(Fraction(i), Fraction(j)) for i in range(-k, k + 1) for j in range(-k, k + 1)
            if i * i + j * j <= bound]


def _unit_cover() -> list[CBall]:
    ring = [CBall(ONE), CBall(HEX_COS, HEX_SIN), CBall(-HEX_COS, HEX_SIN),
            CBall(-ONE), CBall(-HEX_COS, -HEX_SIN), CBall(HEX_COS, -HEX_SIN)]
    return [CBall(ZERO)] + ring


def place_covers(ps: PlaceSystem, delta: Fraction) -> list[list[CBall]]:
    """One cover point list per archimedean place of S_beta."""
    bits = ps.config.prec_start
    covers = []
    for place in ps.archimedean_s_beta:
        if place.modulus_class is ModulusClass.UNIT:
            covers.append(_unit_cover())
            continue
        reach = ps.beta_abs(place, bits)[1]
        covers.append(_real_cover(reach, delta) if place.is_real else _lattice_cover(reach))
    return covers


def _rational_guaranteed(ps: PlaceSystem, delta: Fraction) -> Alphabet:
    beta = ps.field.rational_beta
    s, t = abs(beta.numerator), beta.denominator
    j_max = max(0, math.ceil(s - t * (1 - delta))) + t - 1
    return Alphabet(tuple(ps.field.from_rational(Fraction(j, t)) for j in range(-j_max, j_max + 1)))


def suggest_alphabet(ps: PlaceSystem, mode: str = "guaranteed", M: Optional[int] = None) -> Alphabet:
    if mode not in MODES:
        raise UsageError(f"unknown alphabet mode {mode!r}")
    if mode == "integer-range":
        if M is None or M < 0:
            raise UsageError("integer-range mode needs M >= 0")
        return integer_alphabet(ps.field, -M, M)
    if mode == "complex-pisot-bound":
        bound = complex_pisot_bound(ps)
        return integer_alphabet(ps.field, -bound, bound)

    delta = ps.config.delta
    if ps.field.is_rational_mode:
        return _rational_guaranteed(ps, delta)
    eps = delta / 2
    covers = place_covers(ps, delta)
    total = math.prod(len(c) for c in covers)
    if total > ps.config.memory_points:
        raise MemoryBudgetExceeded(f"guaranteed alphabet needs {total} digits")
    digits, tags = [], []
    for tag in itertools.product(*covers):
        z = weak_approximate(ps, list(tag), eps)
        if z in digits:
            continue
        digits.append(z)
        tags.append(tuple(tag))
    log_debug(f"[Approx] guaranteed alphabet with {len(digits)} digits")
    return Alphabet(tuple(digits), eps, tuple(tags))


# -------------------------------------------------------------------------
#  COVER VALIDATION
# -------------------------------------------------------------------------
def _rational_cover(ps: PlaceSystem, alphabet: Alphabet) -> CoverCertificate:
    """beta = s/t: every residue class mod t must cover [-|beta|, |beta|] on its own."""
    beta = ps.field.rational_beta
    t = beta.denominator
    reach = abs(beta)
    nums = []
    for d in alphabet:
        q = d.rational_value()
        # digits must keep the next state t-integral
        if (q * t).denominator != 1:
            return CoverCertificate("refuted", ZERO, detail=f"digit {q} has a denominator not dividing {t}")
        nums.append(int(q * t))
    worst = ZERO
    for r in range(t):
        centres = [Fraction(n, t) for n in nums if n % t == r]
        if not centres:
            return CoverCertificate("refuted", ZERO, detail=f"no digit in residue class {r} mod {t}")
        worst = max(worst, exact_covering_radius_1d(centres, -reach, reach))
    margin = ONE - worst
    verdict = "certified" if margin >= 0 else "refuted"
    return CoverCertificate(verdict, max(margin, ZERO), covers={"real": worst},
                            detail=f"covering radius {worst}")


def _region(ps: PlaceSystem, bits: int, upper: bool) -> list[RegionPart]:
    parts = []
    for place in ps.archimedean_s_beta:
        lo, hi = ps.beta_abs(place, bits)
        radius = ONE if place.modulus_class is ModulusClass.UNIT else (hi if upper else lo)
        parts.append(RegionPart(place.is_real, CBall(ZERO), radius))
    return parts


def _tag_errors_ok(ps: PlaceSystem, alphabet: Alphabet, bits: int) -> bool:
    return all(approximation_error(ps, d, tag, bits) <= alphabet.epsilon
               for d, tag in zip(alphabet.digits, alphabet.cover_tags))


def _tagged_cover(ps: PlaceSystem, alphabet: Alphabet, grid_points: int, bits: int) -> CoverCertificate:
    radii = {}
    worst = ZERO
    for k, (place, part) in enumerate(zip(ps.archimedean_s_beta, _region(ps, bits, upper=True))):
        points = list({(tag[k].re, tag[k].im): [tag[k]] for tag in alphabet.cover_tags}.values())
        _, hi = covering_radius(points, [part], grid_points, bits)
        radii[place.label()] = hi
        worst = max(worst, hi)
    margin = ONE - worst
    if not _tag_errors_ok(ps, alphabet, bits):
        return CoverCertificate("indeterminate", max(margin, ZERO), covers=radii,
                                detail="a digit misses its tag by more than epsilon")
    verdict = "certified" if margin > alphabet.epsilon else "indeterminate"
    return CoverCertificate(verdict, max(margin, ZERO), covers=radii,
                            detail=f"per-place covers, epsilon {alphabet.epsilon}")


def _joint_cover(ps: PlaceSystem, alphabet: Alphabet, grid_points: int, bits: int) -> CoverCertificate:
    points = [ps.coordinates(d, bits) for d in alphabet]
    _, hi = covering_radius(points, _region(ps, bits, upper=True), grid_points, bits)
    lo, _ = covering_radius(points, _region(ps, bits, upper=False), grid_points, bits)
    radii = {"joint": hi}
    if hi <= ONE:
        return CoverCertificate("certified", ONE - hi, covers=radii, detail=f"covering radius <= {hi}")
    if lo > ONE:
        return CoverCertificate("refuted", ZERO, covers=radii, detail=f"covering radius >= {lo}")
    return CoverCertificate("indeterminate", ZERO, covers=radii,
                            detail=f"covering radius in [{lo}, {hi}]")


def validate_cover(ps: PlaceSystem, alphabet: Alphabet, margin: Optional[Fraction] = None,
                   grid_points: Optional[int] = None, precision: Optional[int] = None) -> CoverCertificate:
    """Check beta*D_1 is inside the union of D_1 + a over the alphabet."""
    grid = grid_points or ps.config.grid_points
    bits = precision or ps.config.prec_start
    if ps.field.is_rational_mode:
        cert = _rational_cover(ps, alphabet)
    elif alphabet.cover_tags is not None:
        cert = _tagged_cover(ps, alphabet, grid, bits)
    else:
        cert = _joint_cover(ps, alphabet, grid, bits)
    if margin is not None and cert.certified and cert.margin < margin:
        cert = CoverCertificate("indeterminate", cert.margin, cert.m_validated, cert.covers,
                                f"overlap {cert.margin} below the requested {margin}")
    log_debug(f"[Approx] cover {cert.verdict}: {cert.detail}")
    return cert
