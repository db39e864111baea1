"""Exact size and height functions for every supported space.

Sizes are multiplicative and exact (big integers) until the final log:
absolute value on the integers, the norm a^2+b^2 on the Gaussian integers,
and the Weil height via the product formula on projective and affine
rational points (max coordinate after gcd reduction, which is the product
formula specialized to the rationals).
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import NamedTuple, Sequence

from .elliptic import ECPoint
from .errors import BoundTooLargeError, SpaceMismatchError
from .spaces import (
    AffPoint,
    FractalSystem,
    GaussPoint,
    IntPoint,
    ProjPoint,
    SpacePoint,
    apply,
    gauss_norm,
)


class SizeValue(NamedTuple):
    """Multiplicative size and its log; raw is an exact nonnegative integer."""

    raw: int
    log_size: float


def _log(raw: int) -> float:
    return math.log(raw) if raw > 1 else 0.0


def raw_size(point: SpacePoint) -> int:
    """Exact multiplicative size of a canonical point."""
    if isinstance(point, IntPoint):
        return abs(point.value)
    if isinstance(point, GaussPoint):
        return gauss_norm(point)
    if isinstance(point, ProjPoint):
        return max(abs(c) for c in point.coords)
    if isinstance(point, AffPoint):
        return affine_height_raw(point.coords)
    if isinstance(point, ECPoint):
        if point.is_infinity:
            return 1
        x = point.x
        return max(abs(x.numerator), abs(x.denominator))
    raise SpaceMismatchError(f"unknown point type {type(point)!r}")


def affine_height_raw(coords: Sequence[Fraction]) -> int:
    """H(1 : x1 : ... : xn) computed exactly by lcm clearing."""
    lcm = 1
    for c in coords:
        lcm = lcm * c.denominator // math.gcd(lcm, c.denominator)
    cleared = [lcm] + [int(c * lcm) for c in coords]
    g = math.gcd(*(abs(v) for v in cleared))
    return max(abs(v) // g for v in cleared)


def size_of(point: SpacePoint) -> SizeValue:
    raw = raw_size(point)
    return SizeValue(raw, _log(raw))


# ---------------------------------------------------------------------------
# Height growth audit: h(f(p)) - deg(f) * h(p) over an enumerated bag
# ---------------------------------------------------------------------------


class MapGrowthStats(NamedTuple):
    map_index: int
    degree: int
    min_residual: float
    max_residual: float
    mean_residual: float
    max_abs_residual: float
    samples: int


def height_growth_audit(system: FractalSystem, bag) -> list[MapGrowthStats]:
    """Per-map residuals of the height relation h(f(p)) = deg(f)*h(p) + O(1).

    The bag must come from the same system; the reported max |residual| is
    the empirical bounded constant.
    """
    if bag.space != system.space:
        raise SpaceMismatchError("bag was enumerated from a different space")
    stats = []
    for i, map_ in enumerate(system.maps):
        degree = map_.degree()
        residuals = []
        for entry in bag.entries:
            image = apply(map_, entry.point)
            residuals.append(size_of(image).log_size - degree * entry.size.log_size)
        if not residuals:
            stats.append(MapGrowthStats(i, degree, 0.0, 0.0, 0.0, 0.0, 0))
            continue
        stats.append(
            MapGrowthStats(
                i,
                degree,
                min(residuals),
                max(residuals),
                sum(residuals) / len(residuals),
                max(abs(r) for r in residuals),
                len(residuals),
            )
        )
    return stats


# ---------------------------------------------------------------------------
# Schanuel's asymptotic over the rationals, and the exact census
# ---------------------------------------------------------------------------

# zeta values hard-coded to 1e-12; only small n is ever needed.
_ZETA = {
    2: math.pi**2 / 6,
    3: 1.2020569031595943,
    4: math.pi**4 / 90,
    5: 1.0369277551433699,
}


def schanuel_prediction(n: int, x: float) -> float:
    """Predicted number of points of P^n(Q) with height at most x.

    Specialization of the general number-field constant to the rationals
    (class number 1, regulator 1, two roots of unity, one real embedding):
    2^(n+1) / (2 zeta(n+1)) * x^(n+1).  For n=1 this is 12 x^2 / pi^2.
    """
    if n + 1 not in _ZETA:
        raise BoundTooLargeError(f"no zeta constant for n={n}")
    return 2 ** (n + 1) / (2 * _ZETA[n + 1]) * float(x) ** (n + 1)


_CENSUS_LIMITS = {1: 10**4, 2: 10**2}


def projective_census(n: int, bound: float, threads: int = 1) -> int:
    """Exact count of canonical points of P^n(Q) with height <= bound.

    Counts by gcd filtering over the integer box with the canonical sign
    rule (first nonzero coordinate positive).  Desk-scale bounds only.
    """
    if n not in _CENSUS_LIMITS:
        raise BoundTooLargeError(f"census supports n in {sorted(_CENSUS_LIMITS)}")
    x = int(bound)
    if x < 0 or x > _CENSUS_LIMITS[n]:
        raise BoundTooLargeError(f"census bound {bound} exceeds desk scale for n={n}")
    if x == 0:
        return 0
    if n == 1:
        return _census_p1(x, threads)
    return _census_p2(x, threads)


def _census_p1(x: int, threads: int = 1) -> int:
    # (0:1) and (1:0), then (a:+-b) with a,b >= 1 coprime.
    count = 2
    chunk = max(1, (x + threads - 1) // threads)
    for start in range(1, x + 1, chunk):
        sub = 0
        for a in range(start, min(start + chunk, x + 1)):
            for b in range(1, x + 1):
                if math.gcd(a, b) == 1:
                    sub += 2
        count += sub
    return count


def _census_p2(x: int, threads: int = 1) -> int:
    # a=0 face is a canonical P^1 census; a >= 1 ranges over a full box in b, c.
    count = _census_p1(x, threads)
    for a in range(1, x + 1):
        for b in range(-x, x + 1):
            g = math.gcd(a, abs(b))
            if g == 1:
                count += 2 * x + 1
                continue
            for c in range(-x, x + 1):
                if math.gcd(g, abs(c)) == 1:
                    count += 1
    return count
