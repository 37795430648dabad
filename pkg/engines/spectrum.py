# engines/spectrum.py
"""
SPECTRUM
========
RESPONSIBILITY: The spectrum X^A(beta) = { sum_{i<=n} a_i beta^i } inside K_beta.

PURPOSE:
- Exact level-by-level enumeration (x -> beta*x + a, deduplicated)
- A separation bound for nonzero differences from the product formula
- Measured minimal gaps and covering radii of a level
- A relative-density semi-decision backed by the attractor certificate

USAGE:
- level = enumerate_spectrum(ps, alphabet, n)
- min_gap(level, ps) >= separation_bound(ps, alphabet) always holds
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import sympy

from engines.approximation import Alphabet
from engines.exact_field import FieldElement
from engines.places import ModulusClass, PlaceSystem, beta_norm, rep_constant
from utils.balls import CBall, ZERO
from utils.errors import MemoryBudgetExceeded, UnitCirclePlacePresent, UsageError
from utils.geometry import RegionPart, covering_radius as _grid_covering_radius, minimal_gap
from utils.logger import log_debug

ONE = Fraction(1)
DENSITY_VERDICTS = ("certified-dense", "evidence-dense", "evidence-sparse", "inconclusive")


@dataclass(frozen=True)
class SpectrumLevel:
    n: int
    points: tuple[FieldElement, ...]
    pruned: int = 0

    def __len__(self) -> int:
        return len(self.points)

    def embeddings(self, ps: PlaceSystem, bits: Optional[int] = None) -> list[list[CBall]]:
        bits = bits or ps.config.prec_start
        return [ps.coordinates(x, bits) for x in self.points]


@dataclass(frozen=True)
class DensityReport:
    verdict: str
    radius: Optional[Fraction] = None
    trend: tuple = ()  # (n, lower, upper) per measured level
    certificate: object = None

    def to_json(self) -> dict:
        out = {"verdict": self.verdict,
               "trend": [{"n": n, "lo": str(lo), "hi": str(hi)} for n, lo, hi in self.trend]}
        if self.radius is not None:
            out["R"] = str(self.radius)
        if self.certificate is not None:
            out["certificate"] = self.certificate.to_json()
        return out


# -------------------------------------------------------------------------
#  ENUMERATION
# -------------------------------------------------------------------------
def _escape_bounds(ps: PlaceSystem, alphabet: Alphabet, radius: Fraction) -> list:
    """Per expanding archimedean place: beyond this modulus no descendant comes back."""
    bits = ps.config.prec_start
    out = []
    for place in ps.archimedean_s_beta:
        if place.modulus_class is ModulusClass.EXPANDING:
            out.append((place, max(radius, rep_constant(ps, alphabet.digits, place, bits))))
    return out


def enumerate_spectrum(ps: PlaceSystem, alphabet: Alphabet, n: int,
                       prune_radius: Optional[Fraction] = None) -> SpectrumLevel:
    if n < 0:
        raise UsageError("level must be nonnegative")
    budget = ps.config.memory_points
    bits = ps.config.prec_start
    escapes = _escape_bounds(ps, alphabet, prune_radius) if prune_radius is not None else []
    pruned = 0

    level = dict.fromkeys(alphabet.digits)
    for _ in range(n):
        nxt: dict = {}
        for x in level:
            bx = x.mul_beta()
            for a in alphabet:
                y = bx + a
                if y in nxt:
                    continue
                if escapes and any(ps.place_abs(y, p, bits)[0] > r for p, r in escapes):
                    pruned += 1
                    continue
                nxt[y] = None
                if len(nxt) > budget:
                    raise MemoryBudgetExceeded(f"spectrum level exceeds {budget} points")
        level = nxt

    points = list(level)
    if prune_radius is not None:
        kept = [x for x in points if beta_norm(x, ps, bits)[0] <= prune_radius]
        pruned += len(points) - len(kept)
        points = kept
    log_debug(f"[Spectrum] level {n}: {len(points)} points, {pruned} pruned")
    return SpectrumLevel(n, tuple(points), pruned)


def to_rows(level: SpectrumLevel, ps: PlaceSystem) -> list[list[str]]:
    """CSV rows: coordinates in the power basis, then re/im per archimedean S_beta place."""
    rows = []
    for x, coords in zip(level.points, level.embeddings(ps)):
        row = [str(c) for c in x.coeffs]
        for place, ball in zip(ps.archimedean_s_beta, coords):
            row.append(repr(float(ball.re)))
            if not place.is_real:
                row.append(repr(float(ball.im)))
        rows.append(row)
    return rows


def csv_header(ps: PlaceSystem) -> list[str]:
    header = [f"c{k}" for k in range(ps.field.degree)]
    for place in ps.archimedean_s_beta:
        header.append(f"{place.label()}_re")
        if not place.is_real:
            header.append(f"{place.label()}_im")
    return header


# -------------------------------------------------------------------------
#  DISCRETENESS
# -------------------------------------------------------------------------
def _root_lower(value: Fraction, s: int) -> Fraction:
    """A rational r > 0 with r^s * value <= 1."""
    if value <= 0:
        return ONE
    r = Fraction(float(value) ** (-1.0 / s)).limit_denominator(1 << 30)
    shrink = Fraction(999_999, 1_000_000)
    while r ** s * value > 1:
        r *= shrink
    return r


def separation_bound(ps: PlaceSystem, alphabet: Alphabet) -> Fraction:
    """Lower bound on |z|_beta for every nonzero z in X^(A-A)(beta)."""
    bits = ps.config.prec_start
    diffs = alphabet.differences()
    D = alphabet.denominator
    field_ = ps.field

    if field_.is_rational_mode:
        t = field_.rational_beta.denominator
        coprime = D
        for p in sympy.factorint(t):
            while coprime % p == 0:
                coprime //= p
        finite = Fraction(coprime)
    else:
        finite = Fraction(D) ** field_.degree

    contracting = ONE
    for place in ps.places:
        if place.modulus_class is not ModulusClass.CONTRACTING:
            continue
        top = max(ps.place_abs(c, place, bits)[1] for c in diffs)
        beta_hi = next(hi for b in ps.config.precisions() if (hi := ps.beta_abs(place, b)[1]) < 1)
        contracting *= (top / (1 - beta_hi)) ** place.weight

    s = sum(p.weight for p in ps.s_beta)
    bound = _root_lower(finite * contracting, s)
    log_debug(f"[Spectrum] separation bound {float(bound):.6g} (s={s})")
    return bound


def _rational_gap(points: Sequence[FieldElement], ps: PlaceSystem) -> tuple[Fraction, tuple[int, int]]:
    """Exact minimal distance in K_beta for rational bases (real place plus p | t)."""
    primes = [p for p in ps.finite_s_beta]
    values = sorted((x.rational_value(), i) for i, x in enumerate(points))
    best, pair = None, (values[0][1], values[1][1])
    for i in range(len(values) - 1):
        for j in range(i + 1, len(values)):
            real = values[j][0] - values[i][0]
            if best is not None and real >= best:
                break
            dist = max([real] + [ps.place_abs(points[values[j][1]] - points[values[i][1]], p, 0)[0]
                                 for p in primes])
            if best is None or dist < best:
                best, pair = dist, (values[i][1], values[j][1])
    return best, pair


def min_gap(level: SpectrumLevel, ps: PlaceSystem) -> tuple[Fraction, Fraction]:
    if len(level.points) < 2:
        raise UsageError("fewer than 2 points")
    if ps.field.is_rational_mode:
        gap, _ = _rational_gap(level.points, ps)
        return gap, gap
    parts = [RegionPart(p.is_real, CBall(ZERO), ONE) for p in ps.archimedean_s_beta]
    lo, hi, _ = minimal_gap(level.embeddings(ps), parts, ps.config.prec_start)
    return lo, hi


# -------------------------------------------------------------------------
#  DENSITY
# -------------------------------------------------------------------------
def window(ps: PlaceSystem, n: int, rho: Fraction = ONE, bits: Optional[int] = None) -> list[RegionPart]:
    """beta^n * B_rho(0) at every archimedean place of S_beta (outer radii)."""
    bits = bits or ps.config.prec_start
    parts = []
    for place in ps.archimedean_s_beta:
        _, hi = ps.beta_abs(place, bits)
        parts.append(RegionPart(place.is_real, CBall(ZERO), rho * hi ** n))
    return parts


def covering_radius(level: SpectrumLevel, region: Sequence[RegionPart], ps: PlaceSystem,
                    grid_points: Optional[int] = None) -> tuple[Fraction, Fraction]:
    if not region:
        raise UsageError("empty region")
    if not level.points:
        raise UsageError("empty spectrum level")
    grid = grid_points or ps.config.grid_points
    return _grid_covering_radius(level.embeddings(ps), list(region), grid, ps.config.prec_start)


def density_test(ps: PlaceSystem, alphabet: Alphabet, budget: Optional[int] = None,
                 certificate=None) -> DensityReport:
    if ps.has_unit_places():
        raise UnitCirclePlacePresent("relative density is only tested without unit-circle conjugates")
    from engines.attractor import NotFound, origin_interior_certificate

    levels = budget or ps.config.max_level
    cert = certificate if certificate is not None else origin_interior_certificate(ps, alphabet, levels)
    if not isinstance(cert, NotFound):
        return DensityReport("certified-dense", certificate=cert)

    trend = []
    for n in range(1, levels + 1):
        try:
            level = enumerate_spectrum(ps, alphabet, n)
        except MemoryBudgetExceeded:
            break
        lo, hi = covering_radius(level, window(ps, n), ps)
        trend.append((n, lo, hi))
    if len(trend) < 2:
        return DensityReport("inconclusive", trend=tuple(trend))
    half = trend[: max(1, len(trend) // 2)]
    early_hi = max(hi for _, _, hi in half)
    last_lo, last_hi = trend[-1][1], trend[-1][2]
    if last_lo >= 2 * early_hi:
        verdict, radius = "evidence-sparse", None
    elif last_hi <= early_hi:
        verdict, radius = "evidence-dense", last_hi
    else:
        verdict, radius = "inconclusive", None
    log_debug(f"[Spectrum] density {verdict} over {len(trend)} levels")
    return DensityReport(verdict, radius, tuple(trend))
