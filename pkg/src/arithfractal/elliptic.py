"""Exact elliptic-curve arithmetic over the rationals.

Implements the group law on a long Weierstrass model, the canonical height
through the doubling limit h(x(2^m P)) / 4^m, the parallelogram-law defect,
and the rank-1 point-counting experiment.  All point coordinates stay exact
rationals; logarithms enter only when a height is reported.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Optional, Sequence

from .errors import (
    GeneratorIsTorsionError,
    PointNotOnCurveError,
    PrecisionNotReachedError,
)

# Torsion over the rationals has order at most 12 (Mazur), so a point is
# torsion iff some multiple up to 12 is the identity.
MAZUR_BOUND = 12

DEFAULT_HEIGHT_TOL = 1e-3
MAX_DOUBLINGS = 12


class ECPoint(NamedTuple):
    """Affine point (x, y) or the point at infinity (both fields None)."""

    x: Optional[Fraction]
    y: Optional[Fraction]

    @property
    def is_infinity(self) -> bool:
        return self.x is None

    def __str__(self):
        if self.is_infinity:
            return "inf"
        return f"({self.x},{self.y})"


INFINITY = ECPoint(None, None)


def ec_point(x, y) -> ECPoint:
    return ECPoint(Fraction(x), Fraction(y))


@dataclass(frozen=True)
class Curve:
    """Long Weierstrass model y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6."""

    a1: Fraction
    a2: Fraction
    a3: Fraction
    a4: Fraction
    a6: Fraction

    def __post_init__(self):
        for name in ("a1", "a2", "a3", "a4", "a6"):
            object.__setattr__(self, name, Fraction(getattr(self, name)))
        if self.discriminant() == 0:
            raise PointNotOnCurveError("curve is singular (discriminant 0)")

    @classmethod
    def from_coefficients(cls, coeffs: Sequence) -> "Curve":
        a1, a2, a3, a4, a6 = (Fraction(c) for c in coeffs)
        return cls(a1, a2, a3, a4, a6)

    def discriminant(self) -> Fraction:
        a1, a2, a3, a4, a6 = self.a1, self.a2, self.a3, self.a4, self.a6
        b2 = a1 * a1 + 4 * a2
        b4 = 2 * a4 + a1 * a3
        b6 = a3 * a3 + 4 * a6
        b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
        return -b2 * b2 * b8 - 8 * b4**3 - 27 * b6 * b6 + 9 * b2 * b4 * b6

    def contains(self, point: ECPoint) -> bool:
        if point.is_infinity:
            return True
        x, y = point.x, point.y
        lhs = y * y + self.a1 * x * y + self.a3 * y
        rhs = x**3 + self.a2 * x * x + self.a4 * x + self.a6
        return lhs == rhs

    def require(self, point: ECPoint) -> None:
        if not self.contains(point):
            raise PointNotOnCurveError(f"point {point} is not on {self}")

    def __str__(self):
        return (
            f"y^2+{self.a1}xy+{self.a3}y=x^3+{self.a2}x^2+{self.a4}x+{self.a6}"
        )


def ec_neg(curve: Curve, point: ECPoint) -> ECPoint:
    if point.is_infinity:
        return INFINITY
    x, y = point.x, point.y
    return ECPoint(x, -y - curve.a1 * x - curve.a3)


def ec_add(curve: Curve, p: ECPoint, q: ECPoint) -> ECPoint:
    """Exact group law, covering doubling, inverse pairs, and infinity."""
    curve.require(p)
    curve.require(q)
    if p.is_infinity:
        return q
    if q.is_infinity:
        return p
    a1, a2, a3, a4 = curve.a1, curve.a2, curve.a3, curve.a4
    x1, y1 = p.x, p.y
    x2, y2 = q.x, q.y
    if x1 == x2 and y1 + y2 + a1 * x2 + a3 == 0:
        return INFINITY
    if p == q:
        lam = (3 * x1 * x1 + 2 * a2 * x1 + a4 - a1 * y1) / (2 * y1 + a1 * x1 + a3)
    else:
        lam = (y2 - y1) / (x2 - x1)
    nu = y1 - lam * x1
    x3 = lam * lam + a1 * lam - a2 - x1 - x2
    y3 = -(lam + a1) * x3 - nu - a3
    return ECPoint(x3, y3)


def ec_mul(curve: Curve, n: int, point: ECPoint) -> ECPoint:
    """n-fold multiple by double-and-add; negative n through negation."""
    if n < 0:
        return ec_mul(curve, -n, ec_neg(curve, point))
    result = INFINITY
    addend = point
    while n:
        if n & 1:
            result = ec_add(curve, result, addend)
        addend = ec_add(curve, addend, addend)
        n >>= 1
    return result


def x_height(point: ECPoint) -> float:
    """Logarithmic Weil height of the x-coordinate, 0 at infinity."""
    if point.is_infinity:
        return 0.0
    x = point.x
    return math.log(max(abs(x.numerator), abs(x.denominator), 1))


def is_torsion(curve: Curve, point: ECPoint) -> bool:
    if point.is_infinity:
        return True
    current = point
    for _ in range(MAZUR_BOUND):
        current = ec_add(curve, current, point)
        if current.is_infinity:
            return True
    return False


class CanonicalHeight(NamedTuple):
    value: float
    doublings: int
    torsion: bool


def canonical_height(
    curve: Curve,
    point: ECPoint,
    tol: float = DEFAULT_HEIGHT_TOL,
    min_doublings: int = 2,
    max_doublings: int = MAX_DOUBLINGS,
) -> CanonicalHeight:
    """Canonical height as the doubling limit h(x(2^m P)) / 4^m.

    Stops once successive estimates differ by less than tol; torsion points
    report height 0 immediately.  Raises PrecisionNotReached if the cap on
    doublings is hit first.
    """
    curve.require(point)
    if is_torsion(curve, point):
        return CanonicalHeight(0.0, 0, True)
    current = point
    estimate = x_height(current)
    for m in range(1, max_doublings + 1):
        current = ec_add(curve, current, current)
        new_estimate = x_height(current) / 4.0**m
        if m >= min_doublings and abs(new_estimate - estimate) < tol:
            return CanonicalHeight(new_estimate, m, False)
        estimate = new_estimate
    raise PrecisionNotReachedError(
        f"height of {point} did not converge to {tol} within {max_doublings} doublings"
    )


def parallelogram_defect(
    curve: Curve, p: ECPoint, q: ECPoint, tol: float = DEFAULT_HEIGHT_TOL
) -> float:
    """|h(P+Q) + h(P-Q) - 2h(P) - 2h(Q)| with each height at tol/4."""

    def height(point: ECPoint) -> float:
        return canonical_height(curve, point, tol / 4).value

    plus = ec_add(curve, p, q)
    minus = ec_add(curve, p, ec_neg(curve, q))
    return abs(height(plus) + height(minus) - 2 * height(p) - 2 * height(q))


class NeronCountResult(NamedTuple):
    table: "object"  # growth.CountTable
    fit: "object"  # growth.GrowthFit
    generator_height: float
    spot_check_max_delta: float


def neron_count(
    curve: Curve,
    generator: ECPoint,
    torsion_points: Sequence[ECPoint],
    x_grid: Sequence[float],
    tol: float = DEFAULT_HEIGHT_TOL,
    rng_seed: int = 0,
) -> NeronCountResult:
    """Counting experiment for the rank-1 subgroup {nP + T}.

    Counts use the quadratic scaling h(nP) = n^2 h(P); five random multiples
    are re-measured with the doubling limit and must agree within 1e-2.
    """
    from . import growth  # local import: growth depends on enumeration

    curve.require(generator)
    if is_torsion(curve, generator):
        raise GeneratorIsTorsionError(f"generator {generator} is torsion")
    torsion = [INFINITY]
    for t in torsion_points:
        curve.require(t)
        if not is_torsion(curve, t):
            raise PointNotOnCurveError(f"{t} supplied as torsion but is not")
        if t not in torsion:
            torsion.append(t)

    gen_height = canonical_height(curve, generator, tol).value
    grid = sorted(float(x) for x in x_grid)
    if not grid:
        raise GeneratorIsTorsionError("empty grid")
    n_max = int(math.isqrt(int(grid[-1] / gen_height))) + 1

    counts = []
    for x in grid:
        reach = math.sqrt(x / gen_height)
        n_reach = int(reach)
        while (n_reach + 1) ** 2 * gen_height <= x:
            n_reach += 1
        while n_reach > 0 and n_reach**2 * gen_height > x:
            n_reach -= 1
        counts.append((2 * n_reach + 1) * len(torsion))

    rng = random.Random(rng_seed)
    max_delta = 0.0
    candidates = list(range(2, min(n_max, 8) + 1)) or [1]
    for n in rng.sample(candidates, min(5, len(candidates))):
        multiple = ec_mul(curve, n, generator)
        direct = canonical_height(curve, multiple, tol).value
        delta = abs(direct - n * n * gen_height)
        max_delta = max(max_delta, delta)
        if delta > 1e-2:
            raise PrecisionNotReachedError(
                f"lattice shortcut disagrees with direct height at n={n}: {delta}"
            )

    table = growth.CountTable(grid=tuple(grid), counts=tuple(counts), size_kind="nt-height")
    fit = growth.fit_growth_exponent(table)
    return NeronCountResult(table, fit, gen_height, max_delta)
