# engines/rep_engine.py
"""
REPRESENTATION ENGINE
=====================
RESPONSIBILITY: Eventually periodic (beta, A)-representations.

PURPOSE:
- Membership in the domain D_m (closed balls per place)
- The transform T(x) = beta*x - a and its digit choice
- Orbit iteration with exact cycle detection
- Exact values of periodic representations, verification, integral and
  fractional parts

FLOW:
1. shift_L picks m and the smallest L with beta^-L * x in D_m
2. step() is iterated from beta^-L * x; states are exact FieldElements
3. The first repeated state closes the cycle (hash map lookup)
4. The digit word is canonicalised (minimal period, no removable tail)

MODES:
- guaranteed: first digit in alphabet order keeping the next state in D_m
- empirical: digit minimising the next state at the expanding places
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from engines.approximation import Alphabet
from engines.exact_field import FieldElement, NumberField
from engines.places import ModulusClass, Place, PlaceSystem, rep_constant
from utils.balls import ZERO
from utils.errors import IterationCapExceeded, NoAdmissibleDigit, PrecisionExhausted, UsageError
from utils.logger import log_debug

ONE = Fraction(1)
MODES = ("guaranteed", "empirical")
MAX_SHIFT = 100_000


@dataclass(frozen=True)
class DomainSpec:
    m: Fraction = ONE

    def __post_init__(self):
        if self.m < 1:
            raise UsageError("domain radius m must be at least 1")

    def radius(self, place: Place) -> Fraction:
        return self.m if place.modulus_class is ModulusClass.UNIT else ONE


@dataclass(frozen=True)
class Policy:
    mode: str = "guaranteed"
    max_iters: int = 1_000_000
    epsilon: Fraction = Fraction(1, 16)
    force_l: Optional[int] = None  # skip shift_L, start from beta^-L * x

    def __post_init__(self):
        if self.mode not in MODES:
            raise UsageError(f"unknown mode {self.mode!r}")
        if self.max_iters < 1:
            raise UsageError("max_iters must be at least 1")


@dataclass(frozen=True)
class Representation:
    field: NumberField
    alphabet: Alphabet
    L: int
    preperiod: tuple[int, ...]
    period: tuple[int, ...]

    def __post_init__(self):
        if not self.period:
            raise UsageError("period must be nonempty")
        n = len(self.alphabet)
        if any(not 0 <= i < n for i in self.preperiod + self.period):
            raise UsageError("digit index outside the alphabet")
        if self.L < 0:
            raise UsageError("L must be nonnegative")

    def to_json(self) -> dict:
        return {
            "minpoly": list(self.field.min_poly.coefficients),
            "alphabet": self.alphabet.to_json(),
            "L": self.L,
            "preperiod": list(self.preperiod),
            "period": list(self.period),
        }


@dataclass(frozen=True)
class OrbitTrace:
    states: tuple[FieldElement, ...]  # s_0 .. s_n, s_n == s_cycle_start
    digits: tuple[int, ...]           # digit index chosen at s_0 .. s_(n-1)
    cycle_start: int
    m: Fraction = ONE
    shift: int = 0
    block: int = 1  # digits emitted per state transition

    @property
    def cycle_length(self) -> int:
        return len(self.digits) - self.cycle_start * self.block


# -------------------------------------------------------------------------
#  DOMAIN
# -------------------------------------------------------------------------
def abs_at_most(ps: PlaceSystem, x: FieldElement, place: Place, bound: Fraction) -> bool:
    """Certified |x|_p <= bound, refining the precision on ties."""
    if not place.is_archimedean or x.is_rational():
        # rationals embed as themselves at every archimedean place
        if place.is_archimedean:
            return abs(x.rational_value()) <= bound
        return ps.place_abs(x, place, 0)[0] <= bound
    for bits in ps.config.precisions():
        lo, hi = ps.place_abs(x, place, bits)
        if hi <= bound:
            return True
        if lo > bound:
            return False
    raise PrecisionExhausted(f"|x| at {place.label()} is too close to {bound}")


def in_domain(x: FieldElement, spec: DomainSpec, ps: PlaceSystem) -> bool:
    if x.is_zero():
        return True
    return all(abs_at_most(ps, x, place, spec.radius(place)) for place in ps.s_beta)


def shift_L(x: FieldElement, ps: PlaceSystem, epsilon: Fraction = Fraction(1, 16),
            max_shift: int = MAX_SHIFT) -> tuple[int, Fraction]:
    """(L, m) with m = max(1, epsilon + max |x| at unit places) and L minimal."""
    bits = ps.config.prec_start
    top = max((ps.place_abs(x, p, bits)[1] for p in ps.unit_places), default=None)
    m = ONE if top is None else max(ONE, epsilon + top)
    spec = DomainSpec(m)
    y, L = x, 0
    while not in_domain(y, spec, ps):
        y = y * ps.field.beta_inverse
        L += 1
        if L > max_shift:
            raise IterationCapExceeded(max_shift, f"no admissible shift within {max_shift} divisions by beta")
    return L, m


# -------------------------------------------------------------------------
#  TRANSFORM
# -------------------------------------------------------------------------
def _expanding_size(ps: PlaceSystem, y: FieldElement) -> Fraction:
    bits = ps.config.prec_start
    worst = ZERO
    for place in ps.s_beta:
        if place.is_archimedean and place.modulus_class is ModulusClass.EXPANDING:
            worst = max(worst, ps.place_abs(y, place, bits)[1])
    return worst


def _finite_ok(ps: PlaceSystem, y: FieldElement) -> bool:
    return all(ps.place_abs(y, p, 0)[0] <= ONE for p in ps.finite_s_beta)


def step(x: FieldElement, alphabet: Alphabet, spec: DomainSpec, policy: Policy,
         ps: PlaceSystem) -> tuple[int, FieldElement]:
    """One application of T: returns (digit index, beta*x - a)."""
    bx = x.mul_beta()
    if policy.mode == "guaranteed":
        for i, a in enumerate(alphabet):
            nxt = bx - a
            if in_domain(nxt, spec, ps):
                return i, nxt
        raise NoAdmissibleDigit(x)

    best, best_size = None, None
    for i, a in enumerate(alphabet):
        nxt = bx - a
        if not _finite_ok(ps, nxt):
            continue
        size = _expanding_size(ps, nxt)
        if best_size is None or size < best_size:
            best, best_size = (i, nxt), size
    if best is None:
        raise NoAdmissibleDigit(x)
    return best


# -------------------------------------------------------------------------
#  REPRESENTATIONS
# -------------------------------------------------------------------------
def _minimal_period(period: Sequence[int]) -> tuple[int, ...]:
    n = len(period)
    for p in range(1, n + 1):
        if n % p == 0 and all(period[k] == period[k % p] for k in range(n)):
            return tuple(period[:p])
    return tuple(period)


def canonical_word(preperiod: Sequence[int], period: Sequence[int]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    pre, per = list(preperiod), list(_minimal_period(period))
    while pre and pre[-1] == per[-1]:
        per = [per[-1]] + per[:-1]
        pre.pop()
    return tuple(pre), tuple(per)


def canonicalize(rep: Representation) -> Representation:
    pre, per = canonical_word(rep.preperiod, rep.period)
    return Representation(rep.field, rep.alphabet, rep.L, pre, per)


def represent(x: FieldElement, alphabet: Alphabet, policy: Policy,
              ps: PlaceSystem) -> tuple[Representation, OrbitTrace]:
    if x.field != ps.field or alphabet.field != ps.field:
        raise UsageError("x, alphabet and place system must share one field")
    if x.is_zero() and alphabet.contains_zero():
        # 0 is a fixed point of T with digit 0
        zero = alphabet.index(x)
        return Representation(ps.field, alphabet, 0, (), (zero,)), OrbitTrace((x, x), (zero,), 0)
    if policy.force_l is not None:
        L, m = policy.force_l, ONE
        top = max((ps.place_abs(x, p, ps.config.prec_start)[1] for p in ps.unit_places), default=None)
        if top is not None:
            m = max(ONE, policy.epsilon + top)
    else:
        L, m = shift_L(x, ps, policy.epsilon)
    spec = DomainSpec(m)
    state = x * ps.field.beta_power(-L) if L else x

    seen: dict[FieldElement, int] = {}
    states: list[FieldElement] = []
    digits: list[int] = []
    while state not in seen:
        if len(states) >= policy.max_iters:
            raise IterationCapExceeded(policy.max_iters)
        seen[state] = len(states)
        states.append(state)
        index, state = step(state, alphabet, spec, policy, ps)
        digits.append(index)
    cycle_start = seen[state]
    states.append(state)
    log_debug(f"[Engine] cycle after {len(digits)} steps (start {cycle_start}, L={L}, m={m})")

    trace = OrbitTrace(tuple(states), tuple(digits), cycle_start, m, L)
    rep = canonicalize(Representation(ps.field, alphabet, L,
                                      tuple(digits[:cycle_start]), tuple(digits[cycle_start:])))
    return rep, trace


def digits_word(rep: Representation, n: int) -> list[int]:
    """First n digit indices of the infinite word (pre-period, then the period repeated)."""
    word = list(rep.preperiod[:n])
    p = len(rep.period)
    while len(word) < n:
        word.append(rep.period[(len(word) - len(rep.preperiod)) % p])
    return word


def _tail_value(rep: Representation, preperiod: Sequence[int], period: Sequence[int]) -> FieldElement:
    """sum_{k>=1} d_k beta^-k for the word preperiod + period^infinity."""
    field_ = rep.field
    inv = field_.beta_inverse
    digits = rep.alphabet.digits
    finite = field_.zero()
    power = field_.one()
    for i in preperiod:
        power = power * inv
        finite = finite + digits[i] * power
    block = field_.zero()
    block_power = field_.one()
    for i in period:
        block_power = block_power * inv
        block = block + digits[i] * block_power
    # block_power == beta^-p now
    periodic = power * block / (field_.one() - block_power)
    return finite + periodic


def value_of(rep: Representation) -> FieldElement:
    tail = _tail_value(rep, rep.preperiod, rep.period)
    return tail * rep.field.beta_power(rep.L) if rep.L else tail


def verify(rep: Representation, x: FieldElement) -> bool:
    return value_of(rep) == x


def split_parts(rep: Representation) -> tuple[FieldElement, Representation]:
    """(inp, frp_rep): digits at beta^0.. beta^(L-1) and the pure fraction after them."""
    L = rep.L
    field_ = rep.field
    head = digits_word(rep, L)
    inp = field_.zero()
    for i in head:
        inp = inp.mul_beta() + rep.alphabet.digits[i]
    if L <= len(rep.preperiod):
        pre, per = rep.preperiod[L:], rep.period
    else:
        shift = (L - len(rep.preperiod)) % len(rep.period)
        pre, per = (), rep.period[shift:] + rep.period[:shift]
    pre, per = canonical_word(pre, per)
    return inp, Representation(field_, rep.alphabet, 0, pre, per)


def frp_bound_check(rep: Representation, ps: PlaceSystem, alphabet: Optional[Alphabet] = None) -> bool:
    """|frp|_p <= C(beta, A, p) at every expanding place of S_beta."""
    alphabet = alphabet or rep.alphabet
    _, frp_rep = split_parts(rep)
    frp = value_of(frp_rep)
    bits = ps.config.prec_start
    for place in ps.s_beta:
        if place.modulus_class is not ModulusClass.EXPANDING:
            continue
        bound = rep_constant(ps, alphabet.digits, place, bits)
        lo, _ = ps.place_abs(frp, place, bits)
        if lo > bound:
            log_debug(f"[Engine] frp exceeds C at {place.label()}: {float(lo)} > {float(bound)}")
            return False
    return True
