# utils/balls.py
"""
Certified complex balls over exact rationals.

A CBall is a centre (re, im) with a radius; the true value always lies in the
closed disc. Centres are rounded back to dyadic rationals after every product
so denominators stay bounded, and the rounding error is added to the radius.
"""

from dataclasses import dataclass
from fractions import Fraction
from math import isqrt

ZERO = Fraction(0)


def _ceil_dyadic(q: Fraction, bits: int) -> Fraction:
    scale = 1 << bits
    n = -((-q.numerator * scale) // q.denominator)
    return Fraction(n, scale)


def sqrt_bounds(q: Fraction, bits: int = 64) -> tuple[Fraction, Fraction]:
    """Rational lower/upper bounds of sqrt(q), 2^-bits apart."""
    if q < 0:
        raise ValueError("sqrt of a negative rational")
    if q == 0:
        return ZERO, ZERO
    scale = 1 << bits
    r = isqrt((q.numerator * scale * scale) // q.denominator)
    return Fraction(r, scale), Fraction(r + 1, scale)


def to_fraction(value) -> Fraction:
    """Exact Fraction of an int, Fraction, float, sympy or mpmath real."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(value)
    if hasattr(value, "_mpf_"):  # mpmath.mpf
        sign, man, exp, _ = value._mpf_
        if not man:
            return ZERO
        return Fraction(-int(man) if sign else int(man)) * (Fraction(2) ** exp)
    if hasattr(value, "p") and hasattr(value, "q"):  # sympy.Rational
        return Fraction(int(value.p), int(value.q))
    return Fraction(str(value))


@dataclass(frozen=True)
class CBall:
    re: Fraction
    im: Fraction = ZERO
    rad: Fraction = ZERO

    @classmethod
    def exact(cls, re, im=0) -> "CBall":
        return cls(to_fraction(re), to_fraction(im), ZERO)

    @property
    def is_real(self) -> bool:
        return self.im == 0

    def __add__(self, other: "CBall") -> "CBall":
        return CBall(self.re + other.re, self.im + other.im, self.rad + other.rad)

    def __sub__(self, other: "CBall") -> "CBall":
        return CBall(self.re - other.re, self.im - other.im, self.rad + other.rad)

    def __neg__(self) -> "CBall":
        return CBall(-self.re, -self.im, self.rad)

    def scale(self, q: Fraction) -> "CBall":
        return CBall(self.re * q, self.im * q, self.rad * abs(q))

    def mul(self, other: "CBall", bits: int) -> "CBall":
        re = self.re * other.re - self.im * other.im
        im = self.re * other.im + self.im * other.re
        rad = (self.abs_upper(bits) * other.rad + other.abs_upper(bits) * self.rad
               + self.rad * other.rad)
        return CBall(re, im, rad).rounded(bits)

    def rounded(self, bits: int) -> "CBall":
        """Snap the centre to a 2^-bits grid, pushing the error into the radius."""
        scale = 1 << bits
        re = Fraction(round(self.re * scale), scale)
        im = Fraction(round(self.im * scale), scale)
        moved = abs(re - self.re) + abs(im - self.im)
        return CBall(re, im, _ceil_dyadic(self.rad + moved, bits))

    def centre_abs_bounds(self, bits: int) -> tuple[Fraction, Fraction]:
        if self.im == 0:
            a = abs(self.re)
            return a, a
        return sqrt_bounds(self.re * self.re + self.im * self.im, bits)

    def abs_bounds(self, bits: int = 64) -> tuple[Fraction, Fraction]:
        lo, hi = self.centre_abs_bounds(bits)
        return max(ZERO, lo - self.rad), hi + self.rad

    def abs_upper(self, bits: int = 64) -> Fraction:
        return self.abs_bounds(bits)[1]

    def abs_lower(self, bits: int = 64) -> Fraction:
        return self.abs_bounds(bits)[0]

    def dist_bounds(self, other: "CBall", bits: int = 64) -> tuple[Fraction, Fraction]:
        return (self - other).abs_bounds(bits)

    def contains(self, re, im=0) -> bool:
        dre, dim = to_fraction(re) - self.re, to_fraction(im) - self.im
        return dre * dre + dim * dim <= self.rad * self.rad

    def inside(self, other: "CBall", bits: int = 64) -> bool:
        """Closed-disc inclusion self ⊆ other, certified from above."""
        _, hi = self.centre_dist_bounds(other, bits)
        return hi + self.rad <= other.rad

    def overlaps(self, other: "CBall", bits: int = 64) -> bool:
        lo, _ = self.centre_dist_bounds(other, bits)
        return lo <= self.rad + other.rad

    def centre_dist_bounds(self, other: "CBall", bits: int = 64) -> tuple[Fraction, Fraction]:
        return CBall(self.re - other.re, self.im - other.im).centre_abs_bounds(bits)

    def as_complex(self) -> complex:
        return complex(float(self.re), float(self.im))

    def to_json(self) -> dict:
        return {"re": float(self.re), "im": float(self.im), "rad": float(self.rad)}
