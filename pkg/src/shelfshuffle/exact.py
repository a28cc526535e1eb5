"""
Exact law of one pass through an m-shelf shuffler.

The chance of a permutation depends only on its number of valleys v:

    P_m(v) = 4^(v+1) / (2 (2m)^n) * sum_{a=0}^{n-1} C(n+m-a-1, n) C(n-1-2v, a-v)

Everything here is computed with ``fractions.Fraction``; decimal output is a
rendering step only (see ``render_decimal``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .permstat import (
    Permutation,
    SignedPermutation,
    cyclic_descents,
    peaks,
    valley_table,
    valleys,
)
from .powerseries import TruncatedSeries

__all__ = [
    "ExactProb", "ShelfSpec", "DistanceReport", "TABLE1_SHELVES",
    "binom", "shelf_prob_by_valleys", "shelf_prob", "shelf_prob_gf_check",
    "bn_signed_prob", "unsigned_bn_prob", "distances", "asymptotic_distances",
    "min_shelves", "render_decimal", "max_valleys",
]

# exact probabilities are plain Fractions (always in lowest terms)
ExactProb = Fraction

TABLE1_SHELVES = (10, 15, 20, 25, 30, 35, 50, 100, 150, 200, 250, 300)


@dataclass(frozen=True)
class ShelfSpec:
    n: int
    m: int

    def __post_init__(self):
        if int(self.n) < 1 or int(self.m) < 1:
            raise ValueError(f"need n >= 1 and m >= 1, got n={self.n}, m={self.m}")


def binom(top: int, bottom: int) -> int:
    """Binomial coefficient that vanishes outside 0 <= bottom <= top."""
    if bottom < 0 or top < 0 or bottom > top:
        return 0
    return math.comb(top, bottom)


def max_valleys(n: int) -> int:
    return max((n - 1) // 2, 0)


@lru_cache(maxsize=None)
def _shelf_prob_by_valleys(n: int, m: int, v: int) -> Fraction:
    total = sum(binom(n + m - a - 1, n) * binom(n - 1 - 2 * v, a - v) for a in range(n))
    return Fraction(4 ** (v + 1) * total, 2 * (2 * m) ** n)


def shelf_prob_by_valleys(spec: ShelfSpec, v: int) -> ExactProb:
    """Chance of any one fixed permutation with v valleys."""
    if not 0 <= v <= max_valleys(spec.n):
        raise ValueError(f"valley count {v} out of range 0..{max_valleys(spec.n)} for n={spec.n}")
    return _shelf_prob_by_valleys(spec.n, spec.m, v)


def shelf_prob(spec: ShelfSpec, w: Permutation) -> ExactProb:
    if w.n != spec.n:
        raise ValueError(f"permutation has length {w.n}, deck has {spec.n} cards")
    return shelf_prob_by_valleys(spec, valleys(w))


def shelf_prob_gf_check(spec: ShelfSpec, v: int) -> ExactProb:
    """
    Same probability read off as a coefficient:

        [t^m] (1+t)^(n+1) / (1-t)^(n+1) * (4t/(1+t)^2)^(v+1) / (2 (2m)^n)
    """
    n, m = spec.n, spec.m
    if not 0 <= v <= max_valleys(n):
        raise ValueError(f"valley count {v} out of range for n={n}")
    t = TruncatedSeries.variable(m)
    ratio = ((1 + t) / (1 - t)) ** (n + 1)
    tent = (4 * t * (1 + t) ** -2) ** (v + 1)
    return (ratio * tent)[m] / (2 * (2 * m) ** n)


def bn_signed_prob(spec: ShelfSpec, w: SignedPermutation) -> ExactProb:
    """Chance of a signed permutation after a hyperoctahedral 2m-shuffle."""
    if w.n != spec.n:
        raise ValueError("length mismatch")
    n, m = spec.n, spec.m
    return Fraction(binom(m + n - cyclic_descents(w.inverse()), n), (2 * m) ** n)


def unsigned_bn_prob(spec: ShelfSpec, w: Permutation) -> ExactProb:
    """Hyperoctahedral 2m-shuffle with signs forgotten; depends on peaks of w^-1."""
    if w.n != spec.n:
        raise ValueError("length mismatch")
    return _shelf_prob_by_valleys(spec.n, spec.m, peaks(w.inverse()))


@dataclass(frozen=True)
class DistanceReport:
    n: int
    m: int
    tv: Fraction
    sep: Fraction
    linf: Fraction
    sep_class: int   # valley count attaining separation
    linf_class: int  # valley count attaining l-infinity

    def as_row(self, digits: int = 3, exact: bool = False) -> dict:
        fmt = (lambda q: f"{q.numerator}/{q.denominator}") if exact else (lambda q: render_decimal(q, digits))
        return {"m": self.m, "tv": fmt(self.tv), "sep": fmt(self.sep), "linf": fmt(self.linf)}

    def as_json(self, digits: int = 3) -> dict:
        out = {"n": self.n, "m": self.m, "sep_class": self.sep_class, "linf_class": self.linf_class}
        for name in ("tv", "sep", "linf"):
            q = getattr(self, name)
            out[name] = {"decimal": render_decimal(q, digits), "exact": f"{q.numerator}/{q.denominator}"}
        return out


def distances(spec: ShelfSpec, scan_all: bool = False) -> DistanceReport:
    """
    Total variation, separation and l-infinity distance to uniform.

    Separation and l-infinity are taken over the two extreme valley classes,
    which is enough because P_m(v) is non-increasing in v. ``scan_all`` checks
    every class instead and raises ArithmeticError if an interior class wins.
    """
    n, m = spec.n, spec.m
    table = valley_table(n)
    nfact = math.factorial(n)
    uniform = Fraction(1, nfact)
    vmax = max_valleys(n)
    probs = [shelf_prob_by_valleys(spec, v) for v in range(vmax + 1)]
    tv = sum((table(n, v) * abs(p - uniform) for v, p in enumerate(probs)), Fraction(0)) / 2

    # classes with v(n,v) = 0 cannot occur, but for n >= 1 every class up to vmax is populated
    def ratio_gap(v: int) -> Fraction:
        return 1 - nfact * probs[v]

    def pick(candidates):
        sep_v = max(candidates, key=ratio_gap)
        linf_v = max(candidates, key=lambda v: abs(ratio_gap(v)))
        return sep_v, linf_v

    sep_class, linf_class = pick(sorted({0, vmax}))
    if scan_all:
        s_all, l_all = pick(range(vmax + 1))
        if ratio_gap(s_all) != ratio_gap(sep_class) or abs(ratio_gap(l_all)) != abs(ratio_gap(linf_class)):
            raise ArithmeticError(f"extreme valley class is not the maximiser for n={n}, m={m}")
    sep, linf = ratio_gap(sep_class), abs(ratio_gap(linf_class))
    return DistanceReport(n, m, tv, sep, linf, sep_class, linf_class)


def asymptotic_distances(c: float) -> tuple[float, float]:
    """Limits of (l-infinity, separation) when m = c n^(3/2) and n grows."""
    if not c > 0:
        raise ValueError("c must be positive")
    return math.expm1(1 / (12 * c * c)), -math.expm1(-1 / (24 * c * c))


def min_shelves(n: int, target: Fraction | float, metric: str = "linf") -> int:
    """Smallest m whose exact distance (``"tv"``, ``"sep"`` or ``"linf"``) is <= target."""
    if metric not in ("tv", "sep", "linf"):
        raise ValueError(f"unknown metric {metric!r}")
    target = Fraction(target)

    def ok(m: int) -> bool:
        return getattr(distances(ShelfSpec(n, m)), metric) <= target

    hi = 1
    while not ok(hi):
        hi *= 2
    lo = hi // 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return hi


def render_decimal(q: Fraction, digits: int = 3) -> str:
    """Round-half-even to ``digits`` decimal places, exactly."""
    if digits < 0:
        raise ValueError("digits must be >= 0")
    scaled = round(Fraction(q) * 10 ** digits)
    sign = "-" if scaled < 0 else ""
    scaled = abs(scaled)
    if digits == 0:
        return f"{sign}{scaled}"
    whole, frac = divmod(scaled, 10 ** digits)
    return f"{sign}{whole}.{frac:0{digits}d}"
