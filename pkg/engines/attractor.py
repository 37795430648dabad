# engines/attractor.py
"""
ATTRACTOR
=========
RESPONSIBILITY: The attractor K(beta, A) = { sum_{i>=1} a_i beta^-i } in K_beta.

PURPOSE:
- Cylinder covers: level-n partial sums with their tail radii
- A certificate that 0 is an interior point of K (B_rho(0) inside K)
- Representations driven by such a certificate
- Cross-validation of the four equivalent conditions
  (1) every x in Q(beta) has an eventually periodic representation
  (2) the same for every x in Z[beta]
  (3) the spectrum is relatively dense in K_beta
  (4) 0 is an interior point of K(beta, A)

CERTIFICATE:
- (n, rho, witness) with beta^n * B_rho(0) inside witness + B_rho(0), where the
  witness is a finite part of X_n = { sum_{i<n} a_i beta^i }.
- Unrolling K = beta^-1 (K + A) n steps at a time shows B_rho(0) lies in K.
- The inclusion holds iff the covering radius of the window by the witness
  is at most rho (closed balls).

FLOW (cross-validation):
1. Search for the certificate (4); reuse it for the density verdict (3)
2. Represent seeded samples of Q(beta) and Z[beta] on the job bus (1), (2)
3. Compare: sign obstructions, frp inside the cylinder cover, round trips
4. The four conditions are equivalent; opposite verdicts are recorded
"""

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from engines.approximation import Alphabet
from engines.exact_field import FieldElement
from engines.places import PlaceSystem, rep_constant
from engines.rep_engine import (
    OrbitTrace,
    Policy,
    Representation,
    abs_at_most,
    canonicalize,
    represent,
    split_parts,
    value_of,
    verify,
)
from engines.spectrum import SpectrumLevel, density_test, enumerate_spectrum, window
from queues.message_bus import run_jobs
from utils.errors import (
    IterationCapExceeded,
    MemoryBudgetExceeded,
    NoAdmissibleDigit,
    PeriodicError,
    UnitCirclePlacePresent,
    UsageError,
)
from utils.geometry import covering_radius
from utils.logger import log_debug

ONE = Fraction(1)
RHO_SCHEDULE = tuple(Fraction(1, 1 << k) for k in range(9))
COVER_CHECK_LEVEL = 4


@dataclass(frozen=True)
class CylinderCover:
    level: SpectrumLevel
    radii: dict  # place index -> tail radius

    def to_json(self) -> dict:
        return {"n": self.level.n, "points": [x.to_json() for x in self.level.points],
                "radii": {str(k): str(v) for k, v in self.radii.items()}}


@dataclass(frozen=True)
class InteriorCertificate:
    n: int
    rho: Fraction
    alphabet: Alphabet
    witness: tuple[FieldElement, ...]
    words: tuple[tuple[int, ...], ...]  # digit indices, coefficient of beta^0 first
    slack: Fraction

    def to_json(self) -> dict:
        return {"n": self.n, "rho": str(self.rho), "slack": str(self.slack),
                "witness_points": [x.to_json() for x in self.witness],
                "witness_words": [list(w) for w in self.words]}


@dataclass(frozen=True)
class NotFound:
    levels: int
    best_ratio: Optional[Fraction] = None  # smallest covering radius / rho seen
    refuted: bool = False
    reason: str = ""

    def to_json(self) -> dict:
        return {"found": False, "levels": self.levels, "refuted": self.refuted, "reason": self.reason,
                "best_ratio": None if self.best_ratio is None else str(self.best_ratio)}


@dataclass(frozen=True)
class SampleSpec:
    count: int = 20
    height: int = 3
    max_den: int = 9
    seed: int = 0
    explicit: tuple = ()


@dataclass
class CrossValidationReport:
    conditions: dict
    samples: list
    contradictions: list = field(default_factory=list)
    flags: list = field(default_factory=list)
    seed: int = 0
    disagreements: list = field(default_factory=list)

    @property
    def consistent(self) -> bool:
        return not self.contradictions

    def to_json(self) -> dict:
        return {"conditions": self.conditions, "samples": self.samples,
                "contradictions": self.contradictions, "flags": self.flags,
                "disagreements": self.disagreements,
                "seed": self.seed, "consistent": self.consistent}


def _require_contractive(ps: PlaceSystem) -> None:
    if ps.has_unit_places():
        raise UnitCirclePlacePresent("the maps x -> (x + a)/beta are not contractive at a unit-circle place")


# -------------------------------------------------------------------------
#  CYLINDERS
# -------------------------------------------------------------------------
def cylinder_cover(ps: PlaceSystem, alphabet: Alphabet, n: int) -> CylinderCover:
    """Level-n partial sums sum_{i=1}^n a_i beta^-i and per-place tail radii."""
    _require_contractive(ps)
    if n < 0:
        raise UsageError("level must be nonnegative")
    bits = ps.config.prec_start
    if n == 0:
        points = SpectrumLevel(0, (ps.field.zero(),))
    else:
        top = enumerate_spectrum(ps, alphabet, n - 1)
        scale = ps.field.beta_power(-n)
        points = SpectrumLevel(n, tuple(dict.fromkeys(x * scale for x in top.points)))
    radii = {}
    for place in ps.s_beta:
        beta_lo, _ = ps.beta_abs(place, bits)
        radii[place.index] = rep_constant(ps, alphabet.digits, place, bits) / beta_lo ** n
    return CylinderCover(points, radii)


def outside_cover(ps: PlaceSystem, cover: CylinderCover, z: FieldElement) -> bool:
    """True only when z is certainly outside every ball of the cover."""
    bits = ps.config.prec_start
    for point in cover.level.points:
        diff = z - point
        if all(ps.place_abs(diff, p, bits)[0] <= cover.radii[p.index] for p in ps.s_beta):
            return False
    return True


def sign_obstruction(ps: PlaceSystem, alphabet: Alphabet) -> int:
    """+1 (-1) when K_beta = R, beta > 0 and every digit is >= 0 (<= 0); else 0.

    Every representable value then has that sign, and K(beta, A) lies on one
    side of 0.
    """
    if ps.finite_s_beta or len(ps.archimedean_s_beta) != 1:
        return 0
    place = ps.archimedean_s_beta[0]
    if not place.is_real:
        return 0
    bits = ps.config.prec_start
    beta = ps.roots_at(bits)[place.root_index].ball
    if beta.re - beta.rad <= 0:
        return 0
    balls = [ps.embed(a, place, bits) for a in alphabet]
    if all(b.re - b.rad >= 0 for b in balls):
        return 1
    if all(b.re + b.rad <= 0 for b in balls):
        return -1
    return 0


# -------------------------------------------------------------------------
#  INTERIOR CERTIFICATE
# -------------------------------------------------------------------------
def _windows(ps: PlaceSystem, n: int, rho: Fraction, bits: int) -> list[tuple]:
    """(place, outer window radius) per archimedean S_beta place."""
    return [(p, part.radius) for p, part in zip(ps.archimedean_s_beta, window(ps, n, rho, bits))]


def _witness_words(ps: PlaceSystem, alphabet: Alphabet, n: int, rho: Fraction) -> dict:
    """X_n points that can reach beta^n B_rho + B_rho, with one digit word each."""
    bits = ps.config.prec_start
    limits = []
    for place, radius in _windows(ps, n, rho, bits):
        beta_lo, _ = ps.beta_abs(place, bits)
        limits.append((place, radius + rho, beta_lo, rep_constant(ps, alphabet.digits, place, bits)))

    def hopeless(x: FieldElement, remaining: int) -> bool:
        for place, limit, beta_lo, const in limits:
            lo, _ = ps.place_abs(x, place, bits)
            if beta_lo ** remaining * (lo - const) > limit:
                return True
        return False

    level = {a: (i,) for i, a in enumerate(alphabet)}
    for step in range(1, n):
        nxt: dict = {}
        for x, word in level.items():
            bx = x.mul_beta()
            for i, a in enumerate(alphabet):
                y = bx + a
                if y in nxt or hopeless(y, n - 1 - step):
                    continue
                nxt[y] = (i,) + word
                if len(nxt) > ps.config.memory_points:
                    raise MemoryBudgetExceeded(f"witness level {n} exceeds the point budget")
        level = nxt
    return {x: w for x, w in level.items()
            if all(ps.place_abs(x, place, bits)[0] <= limit for place, limit, _, _ in limits)}


def _cover_radius(ps: PlaceSystem, witness: Sequence[FieldElement], n: int, rho: Fraction,
                  grid_points: int, bits: int) -> tuple[Fraction, Fraction]:
    points = [ps.coordinates(x, bits) for x in witness]
    return covering_radius(points, window(ps, n, rho, bits), grid_points, bits)


def origin_interior_certificate(ps: PlaceSystem, alphabet: Alphabet, budget: Optional[int] = None):
    """First (n, rho) in schedule order whose inclusion is certified, else NotFound."""
    _require_contractive(ps)
    levels = budget or ps.config.max_level
    if ps.finite_s_beta:
        return NotFound(0, reason="finite places are outside the certificate search")
    if sign_obstruction(ps, alphabet):
        return NotFound(0, refuted=True, reason="all digits share one sign: K lies on one side of 0")

    bits = ps.config.prec_start
    best = None
    for n in range(1, levels + 1):
        try:
            words = _witness_words(ps, alphabet, n, RHO_SCHEDULE[0])
        except MemoryBudgetExceeded:
            log_debug(f"[Attractor] level {n} exceeds the point budget")
            return NotFound(n - 1, best, reason="point budget exhausted")
        if not words:
            continue
        witness = list(words)
        for rho in RHO_SCHEDULE:
            _, hi = _cover_radius(ps, witness, n, rho, ps.config.grid_points, bits)
            ratio = hi / rho
            best = ratio if best is None else min(best, ratio)
            if hi <= rho:
                log_debug(f"[Attractor] certificate at n={n}, rho={rho}, radius <= {float(hi):.6g}")
                return InteriorCertificate(n, rho, alphabet, tuple(witness),
                                           tuple(words[x] for x in witness), rho - hi)
    return NotFound(levels, best, reason="no certified inclusion within the level budget")


def check_certificate(cert: InteriorCertificate, ps: PlaceSystem) -> bool:
    """Replay the inclusion on a grid twice as fine at doubled precision."""
    if not cert.witness or len(cert.witness) != len(cert.words):
        return False
    if cert.rho <= 0 or ps.has_unit_places() or ps.finite_s_beta:
        return False
    digits = cert.alphabet.digits
    for x, word in zip(cert.witness, cert.words):
        if len(word) != cert.n or any(not 0 <= i < len(digits) for i in word):
            return False
        value = ps.field.zero()
        for i in reversed(word):
            value = value.mul_beta() + digits[i]
        if value != x:
            return False
    dim = sum(1 if p.is_real else 2 for p in ps.archimedean_s_beta)
    bits = 2 * ps.config.prec_start
    _, hi = _cover_radius(ps, cert.witness, cert.n, cert.rho, ps.config.grid_points * 2 ** dim, bits)
    return hi <= cert.rho


def represent_via_certificate(x: FieldElement, cert: InteriorCertificate, ps: PlaceSystem,
                              max_iters: int = 1_000_000) -> tuple[Representation, OrbitTrace]:
    """Blocks of n digits: y in B_rho, beta^n y = w + y' with w in the witness, y' in B_rho."""
    places = ps.archimedean_s_beta
    rho, n = cert.rho, cert.n

    def in_ball(y: FieldElement) -> bool:
        return y.is_zero() or all(abs_at_most(ps, y, p, rho) for p in places)

    L, y = 0, x
    while not in_ball(y):
        y = y * ps.field.beta_inverse
        L += 1
    coords = [[b.as_complex() for b in ps.coordinates(w, ps.config.prec_start)] for w in cert.witness]

    seen: dict[FieldElement, int] = {}
    states: list[FieldElement] = []
    digits: list[int] = []
    while y not in seen:
        if len(states) >= max_iters:
            raise IterationCapExceeded(max_iters)
        seen[y] = len(states)
        states.append(y)
        z = y
        for _ in range(n):
            z = z.mul_beta()
        target = [b.as_complex() for b in ps.coordinates(z, ps.config.prec_start)]
        order = sorted(range(len(coords)),
                       key=lambda k: max(abs(c - t) for c, t in zip(coords[k], target)))
        for k in order:
            if in_ball(z - cert.witness[k]):
                break
        else:
            raise NoAdmissibleDigit(y)
        digits.extend(reversed(cert.words[k]))
        y = z - cert.witness[k]
    start = seen[y]
    states.append(y)
    cut = start * n
    trace = OrbitTrace(tuple(states), tuple(digits), start, ONE, L, n)
    rep = canonicalize(Representation(ps.field, cert.alphabet, L, tuple(digits[:cut]), tuple(digits[cut:])))
    return rep, trace


# -------------------------------------------------------------------------
#  CROSS-VALIDATION
# -------------------------------------------------------------------------
def draw_samples(ps: PlaceSystem, spec: SampleSpec) -> list[tuple[str, FieldElement]]:
    """Seeded samples: ("Q", x) from Q(beta) and ("Z", x) from Z[beta]."""
    rng = random.Random(spec.seed)
    out = []
    for x in spec.explicit:
        out.append(("Z" if x.den == 1 else "Q", x))
    for k in range(spec.count):
        if k % 2 == 0:
            out.append(("Q", ps.field.random_element(rng, spec.height, spec.max_den)))
        else:
            out.append(("Z", ps.field.random_element(rng, spec.height, 1)))
    return out


def _run_sample(payload) -> dict:
    ps, alphabet, x, cert, policy = payload
    try:
        if cert is not None:
            rep, trace = represent_via_certificate(x, cert, ps, policy.max_iters)
        else:
            rep, trace = represent(x, alphabet, policy, ps)
    except IterationCapExceeded:
        return {"status": "cap"}
    except NoAdmissibleDigit:
        return {"status": "no-digit"}
    except PeriodicError as e:
        return {"status": "error", "detail": str(e)}
    return {"status": "periodic", "rep": rep, "steps": len(trace.digits), "verified": verify(rep, x)}


def _condition_verdict(entries: Sequence[dict]) -> str:
    if not entries:
        return "inconclusive"
    if any(e["status"] == "impossible" for e in entries):
        return "negative"
    if all(e["status"] == "periodic" and e["verified"] for e in entries):
        return "positive"
    return "inconclusive"


def _density_label(verdict: str) -> str:
    return {"certified-dense": "positive", "evidence-dense": "evidence-positive",
            "evidence-sparse": "evidence-negative"}.get(verdict, "inconclusive")


# verdicts backed by a proof rather than by samples or grid evidence
PROVEN = {("1", "negative"), ("2", "negative"), ("3", "positive"), ("4", "positive"), ("4", "negative")}


def compare_conditions(conditions: dict) -> tuple[list[str], list[str]]:
    """(contradictions, disagreements) between conditions with opposite verdicts."""
    sides = {k: ("positive" if v.endswith("positive") else "negative")
             for k, v in conditions.items() if v != "inconclusive"}
    contradictions, disagreements = [], []
    for a, b in itertools.combinations(sorted(sides), 2):
        if sides[a] == sides[b]:
            continue
        note = f"condition {a} is {conditions[a]} but condition {b} is {conditions[b]}"
        if (a, conditions[a]) in PROVEN and (b, conditions[b]) in PROVEN:
            contradictions.append(note)
        else:
            disagreements.append(note)
    return contradictions, disagreements


def cross_validate_main2(ps: PlaceSystem, alphabet: Alphabet, sample_spec: SampleSpec = SampleSpec(),
                         budget: Optional[int] = None, policy: Optional[Policy] = None) -> CrossValidationReport:
    _require_contractive(ps)
    policy = policy or Policy(max_iters=ps.config.max_iters)
    levels = budget or ps.config.max_level

    cert = origin_interior_certificate(ps, alphabet, levels)
    found = isinstance(cert, InteriorCertificate)
    density = density_test(ps, alphabet, levels, certificate=cert)
    sign = sign_obstruction(ps, alphabet)

    samples = draw_samples(ps, sample_spec)
    payloads = [(ps, alphabet, x, cert if found else None, policy) for _, x in samples]
    messages = run_jobs(payloads, _run_sample, ps.config.workers)
    cover = cylinder_cover(ps, alphabet, COVER_CHECK_LEVEL)
    bits = ps.config.prec_start

    entries, contradictions, flags = [], [], []
    for (kind, x), message in zip(samples, messages):
        outcome = message.get("result") or {"status": "error", "detail": str(message.get("error"))}
        entry = {"kind": kind, "x": str(x), "status": outcome["status"], "verified": outcome.get("verified", False)}
        sign_x = 0
        if not x.is_zero() and sign:
            ball = ps.embed(x, ps.archimedean_s_beta[0], bits)
            sign_x = 1 if ball.re - ball.rad > 0 else (-1 if ball.re + ball.rad < 0 else 0)
        forbidden = bool(sign) and sign_x == -sign

        if outcome["status"] == "periodic":
            rep = outcome["rep"]
            entry.update({"L": rep.L, "preperiod": list(rep.preperiod), "period": list(rep.period),
                          "steps": outcome["steps"]})
            if not outcome["verified"]:
                contradictions.append(f"{x}: representation does not round-trip")
            if forbidden:
                contradictions.append(f"{x}: represented although every representable value has the other sign")
            _, frp_rep = split_parts(rep)
            if outside_cover(ps, cover, value_of(frp_rep)):
                contradictions.append(f"{x}: fractional part outside the level-{COVER_CHECK_LEVEL} cylinder cover")
        elif forbidden:
            entry["status"] = "impossible"
        if outcome["status"] == "cap" and found:
            flags.append(f"{x}: iteration cap reached despite a certificate; increase --max-iters")
        entries.append(entry)

    if found and sign:
        contradictions.append("interior certificate issued while K lies on one side of 0")

    if found:
        interior = "positive"
    elif cert.refuted:
        interior = "negative"
    else:
        interior = "inconclusive"
    conditions = {
        "1": _condition_verdict(entries),
        "2": _condition_verdict([e for e in entries if e["kind"] == "Z"]),
        "3": _density_label(density.verdict),
        "4": interior,
    }
    proven, disagreements = compare_conditions(conditions)
    contradictions.extend(proven)
    log_debug(f"[Attractor] cross-validation {conditions}, {len(contradictions)} contradictions, "
              f"{len(disagreements)} disagreements")
    return CrossValidationReport(conditions, entries, contradictions, flags, sample_spec.seed, disagreements)
