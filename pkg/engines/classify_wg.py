# engines/classify_wg.py
"""
Weak-greedy admissibility and base classification.

A base admits weak-greedy representations exactly when it is an algebraic
integer with no conjugate outside the closed unit disk apart from beta and
its complex conjugate. The decision reads the certified root classes of the
place system; unit-circle roots come from the exact trace-polynomial count.
"""

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from engines.approximation import Alphabet
from engines.exact_field import NumberField
from engines.places import BaseClass, ModulusClass, PlaceSystem, RootBall, beta_norm, classify_base
from engines.rep_engine import Policy, represent, verify
from utils.errors import IterationCapExceeded, NoAdmissibleDigit, NotMonic, UsageError
from utils.logger import log_debug


@dataclass(frozen=True)
class WeakGreedyVerdict:
    admits: bool
    base_class: BaseClass
    offending_conjugates: tuple[RootBall, ...] = ()

    def to_json(self) -> dict:
        return {
            "class": self.base_class.label,
            "weak_greedy": self.admits,
            "witnesses": [rb.to_json() for rb in self.offending_conjugates],
        }


@dataclass(frozen=True)
class ProbeReport:
    threshold: Fraction
    tried: int
    fractional: int  # samples with a periodic representation using beta^-1, beta^-2, ... only
    failures: tuple = field(default=())

    def to_json(self) -> dict:
        return {"c": str(self.threshold), "tried": self.tried, "fractional": self.fractional,
                "failures": list(self.failures)}


def weak_greedy_decision(field_: NumberField, place_system: PlaceSystem) -> WeakGreedyVerdict:
    base = classify_base(field_, place_system)
    if field_.is_rational_mode:
        if field_.rational_beta.denominator != 1:
            raise NotMonic(f"{field_.min_poly} is not monic: beta is not an algebraic integer")
        return WeakGreedyVerdict(True, base)

    ps = place_system
    exempt = {ps.distinguished, ps.conjugate_of(ps.distinguished)}
    offending = tuple(
        ps.roots[i] for i, cls in enumerate(ps.root_classes)
        if i not in exempt and cls is ModulusClass.EXPANDING
    )
    log_debug(f"[Classify] {field_.min_poly}: {base.label}, {len(offending)} offending conjugates")
    return WeakGreedyVerdict(not offending, base, offending)


def weak_greedy_probe(place_system: PlaceSystem, alphabet: Alphabet, samples: int, c: Fraction,
                      seed: Optional[int] = None, max_iters: int = 100_000) -> ProbeReport:
    """Represent random x with |x|_beta < c starting at L = 0 (no integral part)."""
    if c <= 0:
        raise UsageError("threshold c must be positive")
    ps = place_system
    rng = random.Random(ps.config.seed if seed is None else seed)
    policy = Policy(mode="guaranteed", max_iters=max_iters, force_l=0)
    bits = ps.config.prec_start
    tried, good, failures = 0, 0, []
    attempts = 0
    while tried < samples and attempts < 50 * samples:
        attempts += 1
        x = ps.field.random_element(rng, 8, 16) * Fraction(1, 8)
        if beta_norm(x, ps, bits)[1] >= c:
            continue
        tried += 1
        try:
            rep, _ = represent(x, alphabet, policy, ps)
        except (NoAdmissibleDigit, IterationCapExceeded) as e:
            failures.append({"x": str(x), "error": type(e).__name__})
            continue
        if verify(rep, x):
            good += 1
        else:
            failures.append({"x": str(x), "error": "round trip"})
    return ProbeReport(Fraction(c), tried, good, tuple(failures))
