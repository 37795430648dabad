# utils/geometry.py
"""
Covering radii and nearest gaps of finite point sets in K_beta.

A point of K_beta is given by its archimedean coordinates, one CBall per
place (real places carry im == 0). Distances use the max-norm over places
with the Euclidean modulus inside each complex place.

Upper bounds are exact rational computations on the ball centres plus the
grid slack. The nearest-neighbour search runs in floating point (numpy) and
its lower bounds subtract an explicit rounding guard.
"""

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from utils.balls import CBall, ZERO

# upper bound for sqrt(2)/2
HALF_DIAGONAL = Fraction(70711, 100000)
FLOAT_GUARD = 1e-9


@dataclass(frozen=True)
class RegionPart:
    """A closed ball of radius `radius` around `centre` at one place."""

    is_real: bool
    centre: CBall
    radius: Fraction


def exact_covering_radius_1d(centres: Sequence[Fraction], lo: Fraction, hi: Fraction) -> Fraction:
    """max over y in [lo, hi] of the distance to the nearest centre."""
    cs = sorted(centres)
    if not cs:
        raise ValueError("empty point set")
    best = ZERO
    if lo < cs[0]:
        best = cs[0] - lo
    for p, q in zip(cs, cs[1:]):
        left, right = max(p, lo), min(q, hi)
        if left > right:
            continue
        y = min(max((p + q) / 2, left), right)
        best = max(best, min(y - p, q - y))
    if hi > cs[-1]:
        best = max(best, hi - cs[-1])
    return best


def covering_radius_1d(points: Sequence[CBall], lo: Fraction, hi: Fraction) -> tuple[Fraction, Fraction]:
    exact = exact_covering_radius_1d([p.re for p in points], lo, hi)
    wobble = max((p.rad for p in points), default=ZERO)
    return max(ZERO, exact - wobble), exact + wobble


def _coords(ball: CBall, is_real: bool) -> list[float]:
    return [float(ball.re)] if is_real else [float(ball.re), float(ball.im)]


def _place_cells(part: RegionPart, k: int) -> tuple[list[CBall], Fraction]:
    """Cell centres covering one place's ball, and the in-cell slack."""
    h = 2 * part.radius / k
    offsets = [-part.radius + h * (i + Fraction(1, 2)) for i in range(k)]
    if part.is_real:
        return [CBall(part.centre.re + o, ZERO) for o in offsets], h / 2
    slack = h * HALF_DIAGONAL
    reach = float(part.radius + slack)
    cells = []
    for ox, oy in itertools.product(offsets, offsets):
        if (float(ox) ** 2 + float(oy) ** 2) ** 0.5 <= reach:
            cells.append(CBall(part.centre.re + ox, part.centre.im + oy))
    return cells, slack


def _point_matrix(points: Sequence[Sequence[CBall]], parts: Sequence[RegionPart]) -> np.ndarray:
    rows = []
    for point in points:
        row = []
        for ball, part in zip(point, parts):
            row.extend(_coords(ball, part.is_real))
        rows.append(row)
    return np.asarray(rows, dtype=float)


def _place_slices(parts: Sequence[RegionPart]) -> list[slice]:
    slices, start = [], 0
    for part in parts:
        width = 1 if part.is_real else 2
        slices.append(slice(start, start + width))
        start += width
    return slices


def _maxnorm_distances(block: np.ndarray, pts: np.ndarray, slices: list[slice]) -> np.ndarray:
    dist = None
    for sl in slices:
        diff = block[:, None, sl] - pts[None, :, sl]
        d = np.sqrt(np.sum(diff * diff, axis=2))
        dist = d if dist is None else np.maximum(dist, d)
    return dist


def _inside(cell: Sequence[CBall], parts: Sequence[RegionPart]) -> bool:
    for ball, part in zip(cell, parts):
        dre, dim = ball.re - part.centre.re, ball.im - part.centre.im
        if dre * dre + dim * dim > part.radius * part.radius:
            return False
    return True


def exact_distance_bounds(a: Sequence[CBall], b: Sequence[CBall], bits: int = 64) -> tuple[Fraction, Fraction]:
    lo, hi = ZERO, ZERO
    for x, y in zip(a, b):
        l, h = x.dist_bounds(y, bits)
        lo, hi = max(lo, l), max(hi, h)
    return lo, hi


def covering_radius_grid(
    points: Sequence[Sequence[CBall]],
    parts: Sequence[RegionPart],
    grid_points: int,
    bits: int = 64,
    chunk: int = 512,
) -> tuple[Fraction, Fraction]:
    """Certified bracket of the covering radius of `points` over the region."""
    if not points:
        raise ValueError("empty point set")
    total_dim = sum(1 if p.is_real else 2 for p in parts)
    k = max(1, int(round(grid_points ** (1.0 / total_dim))))
    per_place = [_place_cells(part, k) for part in parts]
    slack = max(s for _, s in per_place)
    cells = list(itertools.product(*[c for c, _ in per_place]))

    pts = _point_matrix(points, parts)
    slices = _place_slices(parts)
    scale = 1.0 + float(np.max(np.abs(pts))) if pts.size else 1.0
    wobble = max((b.rad for point in points for b in point), default=ZERO)
    guard = Fraction(FLOAT_GUARD * scale) + wobble

    lower, upper = ZERO, ZERO
    for start in range(0, len(cells), chunk):
        batch = cells[start:start + chunk]
        block = _point_matrix(batch, parts)
        dist = _maxnorm_distances(block, pts, slices)
        nearest = np.argmin(dist, axis=1)
        for row, cell in enumerate(batch):
            j = int(nearest[row])
            _, hi = exact_distance_bounds(cell, points[j], bits)
            upper = max(upper, hi + slack)
            if _inside(cell, parts):
                lower = max(lower, Fraction(float(dist[row, j])) - guard)
    return max(ZERO, lower), upper


def covering_radius(
    points: Sequence[Sequence[CBall]],
    parts: Sequence[RegionPart],
    grid_points: int,
    bits: int = 64,
) -> tuple[Fraction, Fraction]:
    if len(parts) == 1 and parts[0].is_real:
        part = parts[0]
        return covering_radius_1d(
            [p[0] for p in points], part.centre.re - part.radius, part.centre.re + part.radius
        )
    return covering_radius_grid(points, parts, grid_points, bits)


def minimal_gap(
    points: Sequence[Sequence[CBall]],
    parts: Sequence[RegionPart],
    bits: int = 64,
) -> tuple[Fraction, Fraction, tuple[int, int]]:
    """Bracket of the minimal pairwise max-norm distance, plus the closest pair.

    Sweep over the first coordinate: a pair can only beat the current best if
    their first coordinates are closer than it.
    """
    if len(points) < 2:
        raise ValueError("fewer than 2 points")
    pts = _point_matrix(points, parts)
    slices = _place_slices(parts)
    order = np.argsort(pts[:, 0], kind="stable")
    rows = pts[order].tolist()
    spans = [(sl.start, sl.stop) for sl in slices]

    def dist(a, b):
        worst = 0.0
        for lo_k, hi_k in spans:
            worst = max(worst, sum((a[k] - b[k]) ** 2 for k in range(lo_k, hi_k)))
        return math.sqrt(worst)

    best, pair = float("inf"), (int(order[0]), int(order[1]))
    n = len(rows)
    for i in range(n - 1):
        j = i + 1
        while j < n and rows[j][0] - rows[i][0] < best:
            d = dist(rows[i], rows[j])
            if d < best:
                best, pair = d, (int(order[i]), int(order[j]))
            j += 1
    lo, hi = exact_distance_bounds(points[pair[0]], points[pair[1]], bits)
    scale = 1.0 + float(np.max(np.abs(pts)))
    wobble = 2 * max((b.rad for point in points for b in point), default=ZERO)
    float_floor = Fraction(best) - Fraction(FLOAT_GUARD * scale) - wobble
    return max(ZERO, min(lo, float_floor)), hi, pair
