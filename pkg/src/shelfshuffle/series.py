"""
Generating-function evaluations for statistics of a shelf-shuffled deck.

* cycle counts, from the product over i of ((1 + x_i (u/2m)^i) / (1 - x_i (u/2m)^i))^f(i,m)
* RSK shape, from f_lambda / 2^n * S_lambda(1/m, ..., 1/m)
* descents, from (1-t)^(n+1) / 2^n * sum_k t^k [u^n] ((1 + u/m) / (1 - u/m))^(km)

All results are exact rational distributions (``DiscreteDist``).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Any, Sequence

from .exact import ShelfSpec, binom, render_decimal
from .permstat import Partition, partitions, syt_count
from .powerseries import TruncatedSeries, TruncationError, poly_mul

__all__ = [
    "DiscreteDist", "FimTable", "mobius", "f_im", "fim_table",
    "cycle_product_series", "cycle_count_dist", "cycle_limit_law",
    "fixed_point_limit_law", "q_series", "schur_s", "rsk_shape_dist",
    "descent_kernel", "descent_dist", "descent_moments", "DEFAULT_TAIL",
    "total_variation",
]

DEFAULT_TAIL = Fraction(1, 10 ** 12)


@dataclass
class DiscreteDist:
    statistic: str
    support: list[Any]
    probs: list[Fraction]
    n: int | None = None
    m: int | None = None
    tail: Fraction = Fraction(0)  # probability mass beyond the listed support
    meta: dict = field(default_factory=dict)

    def total(self) -> Fraction:
        return sum(self.probs, Fraction(0))

    def as_dict(self) -> dict:
        return dict(zip(self.support, self.probs))

    def __getitem__(self, value) -> Fraction:
        return self.as_dict().get(value, Fraction(0))

    def mean(self) -> Fraction:
        return sum((Fraction(x) * p for x, p in zip(self.support, self.probs)), Fraction(0))

    def variance(self) -> Fraction:
        mu = self.mean()
        return sum((p * (Fraction(x) - mu) ** 2 for x, p in zip(self.support, self.probs)), Fraction(0))

    def to_json(self, digits: int = 6, exact: bool = True) -> dict:
        out = {
            "statistic": self.statistic,
            "n": self.n,
            "m": self.m,
            "support": [str(s) if isinstance(s, Partition) else s for s in self.support],
            "probs": [
                {"decimal": render_decimal(p, digits), **({"exact": f"{p.numerator}/{p.denominator}"} if exact else {})}
                for p in self.probs
            ],
        }
        if self.tail:
            out["tail"] = render_decimal(self.tail, max(digits, 15))
        return out

    def to_csv_rows(self, digits: int = 6, exact: bool = False) -> list[tuple[str, str]]:
        fmt = (lambda p: f"{p.numerator}/{p.denominator}") if exact else (lambda p: render_decimal(p, digits))
        return [(str(s), fmt(p)) for s, p in zip(self.support, self.probs)]


def total_variation(p: DiscreteDist, q: DiscreteDist) -> Fraction:
    a, b = p.as_dict(), q.as_dict()
    keys = set(a) | set(b)
    return (sum((abs(a.get(k, 0) - b.get(k, 0)) for k in keys), Fraction(0)) + p.tail + q.tail) / 2


# -- f_{i,m} -------------------------------------------------------------------

@lru_cache(maxsize=None)
def mobius(d: int) -> int:
    if d < 1:
        raise ValueError("mobius is defined for positive integers")
    result, k, rest = 1, 2, d
    while k * k <= rest:
        if rest % k == 0:
            rest //= k
            if rest % k == 0:
                return 0
            result = -result
        k += 1
    if rest > 1:
        result = -result
    return result


@lru_cache(maxsize=None)
def f_im(i: int, m: int) -> int:
    """(1/2i) * sum over odd divisors d of i of mu(d) (2m)^(i/d); always an integer."""
    if i < 1 or m < 1:
        raise ValueError("need i >= 1 and m >= 1")
    total = sum(mobius(d) * (2 * m) ** (i // d) for d in range(1, i + 1, 2) if i % d == 0)
    q, r = divmod(total, 2 * i)
    if r:
        raise ArithmeticError(f"Mobius sum {total} for i={i}, m={m} is not divisible by {2 * i}")
    return q


@dataclass(frozen=True)
class FimTable:
    m: int
    values: tuple[int, ...]  # values[i-1] = f_{i,m}

    def __call__(self, i: int) -> int:
        return self.values[i - 1]


def fim_table(m: int, i_max: int) -> FimTable:
    return FimTable(m, tuple(f_im(i, m) for i in range(1, i_max + 1)))


# -- cycle type ------------------------------------------------------------------

def _cycle_factor(i: int, m: int, f: int, order: int) -> TruncatedSeries:
    """((1 + (u/2m)^i) / (1 - (u/2m)^i))^f truncated at ``order``."""
    z = TruncatedSeries.variable(order, Fraction(1, (2 * m) ** i), i)
    return ((1 + z) ** f) * ((1 - z) ** -f)


def cycle_product_series(m: int, order: int, skip: Sequence[int] = (), i_max: int | None = None) -> TruncatedSeries:
    """
    Product over i = 1..i_max (i not in ``skip``) of the cycle factors with all
    x_i = 1, truncated at u-order ``order``. With nothing skipped the result
    is 1/(1-u).
    """
    if i_max is None:
        i_max = order
    if i_max < order:
        raise TruncationError(f"factors up to i={order} affect u^{order}; i_max={i_max} is too small")
    acc = TruncatedSeries.constant(1, order)
    for i in range(1, order + 1):
        if i not in skip:
            acc = acc * _cycle_factor(i, m, f_im(i, m), order)
    return acc


def cycle_count_dist(spec: ShelfSpec, i: int, i_max: int | None = None) -> DiscreteDist:
    """
    Exact law of N_i, the number of i-cycles, after one m-shelf pass.

    x_i stays symbolic: the x_i-factor contributes beta_k x^k (u/2m)^(ik), with
    beta_k = sum_s C(f, s) C(f + k - s - 1, k - s), so
    P(N_i = k) = [u^(n - ik)] (other factors) * beta_k / (2m)^(ik).
    """
    n, m = spec.n, spec.m
    if not 1 <= i <= n:
        raise ValueError(f"cycle length must be in 1..{n}")
    rest = cycle_product_series(m, n, skip=(i,), i_max=i_max)
    f = f_im(i, m)
    support, probs = [], []
    for k in range(n // i + 1):
        beta = sum(binom(f, s) * binom(f + k - s - 1, k - s) for s in range(k + 1)) if k else 1
        support.append(k)
        probs.append(rest[n - i * k] * Fraction(beta, (2 * m) ** (i * k)))
    return DiscreteDist(f"N_{i}", support, probs, n=n, m=m)


def _binomial_pmf(f: int, p: Fraction) -> list[Fraction]:
    return [binom(f, j) * p ** j * (1 - p) ** (f - j) for j in range(f + 1)]


def cycle_limit_law(i: int, m: int, tail: Fraction | float = DEFAULT_TAIL) -> DiscreteDist:
    """
    Large-deck law of N_i: Binomial(f, 1/((2m)^i + 1)) convolved with a negative
    binomial, P(X = j) = C(f+j-1, j) p^j (1-p)^f with p = (2m)^-i, f = f_{i,m}.
    The support is cut once the cumulative mass reaches 1 - tail.
    """
    tail = Fraction(tail)
    f = f_im(i, m)
    q = Fraction(1, (2 * m) ** i)
    bin_pmf = _binomial_pmf(f, Fraction(1, (2 * m) ** i + 1))
    nb_pmf: list[Fraction] = []
    j, term, cum = 0, (1 - q) ** f, Fraction(0)
    while True:
        nb_pmf.append(term)
        cum += term
        if 1 - cum <= tail / 2:
            break
        # C(f+j, j+1)/C(f+j-1, j) = (f+j)/(j+1)
        term = term * (f + j) * q / (j + 1)
        j += 1
    conv = poly_mul(bin_pmf, nb_pmf)
    # cut the convolution where its own cumulative mass reaches 1 - tail
    support, probs, cum = [], [], Fraction(0)
    for k, p in enumerate(conv):
        support.append(k)
        probs.append(p)
        cum += p
        if 1 - cum <= tail:
            break
    return DiscreteDist(f"N_{i} limit", support, probs, m=m, tail=1 - cum)


def fixed_point_limit_law(m: int, tail: Fraction | float = DEFAULT_TAIL) -> DiscreteDist:
    """Binomial(m, 1/(2m+1)) convolved with NegativeBinomial(m, 1/(2m))."""
    return cycle_limit_law(1, m, tail)


# -- RSK shape ---------------------------------------------------------------------

def q_series(m: int, order: int) -> TruncatedSeries:
    """sum_r q_r t^r = ((1 + t/m) / (1 - t/m))^m."""
    t = TruncatedSeries.variable(order, Fraction(1, m))
    return ((1 + t) / (1 - t)) ** m


def _det(matrix: list[list[Fraction]]) -> Fraction:
    a = [row[:] for row in matrix]
    size = len(a)
    det = Fraction(1)
    for col in range(size):
        pivot = next((r for r in range(col, size) if a[r][col] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            a[col], a[pivot] = a[pivot], a[col]
            det = -det
        det *= a[col][col]
        for r in range(col + 1, size):
            factor = a[r][col] / a[col][col]
            if factor:
                for c in range(col, size):
                    a[r][c] -= factor * a[col][c]
    return det


def schur_s(shape: Partition | Sequence[int], m: int) -> Fraction:
    """S_lambda at y_1 = ... = y_m = 1/m, as det(q_{lambda_i - i + j})."""
    lam = shape if isinstance(shape, Partition) else Partition(tuple(shape))
    if not lam.parts:
        return Fraction(1)
    ell = len(lam)
    q = q_series(m, lam.parts[0] + ell)

    def qq(r: int) -> Fraction:
        return q[r] if r >= 0 else Fraction(0)

    return _det([[qq(lam.parts[i] - (i + 1) + (j + 1)) for j in range(ell)] for i in range(ell)])


def rsk_shape_dist(spec: ShelfSpec) -> DiscreteDist:
    """P(shape = lambda) = f_lambda / 2^n * S_lambda(1/m, ..., 1/m), partitions in reverse-lex order."""
    n, m = spec.n, spec.m
    support = list(partitions(n))
    probs = [Fraction(syt_count(lam), 2 ** n) * schur_s(lam, m) for lam in support]
    return DiscreteDist("rsk_shape", support, probs, n=n, m=m)


# -- descents ------------------------------------------------------------------------

def descent_kernel(n: int, m: int, k: int) -> Fraction:
    """[u^n] ((1 + u/m) / (1 - u/m))^(km)."""
    return (_descent_base(n, m) ** (k * m))[n]


@lru_cache(maxsize=64)
def _descent_base(n: int, m: int) -> TruncatedSeries:
    u = TruncatedSeries.variable(n, Fraction(1, m))
    return (1 + u) / (1 - u)


def descent_dist(spec: ShelfSpec, verify: bool = True) -> DiscreteDist:
    """
    Exact law of d(w^-1), the descents of the map taking each card to its
    final position (equivalently, rising-sequence count minus one). The k-sum is taken to k = n+1, which fixes every
    coefficient up to t^(n+1); with ``verify`` it is run two terms further and
    the coefficients of t^(n+1)..t^(n+3) (and t^0) must vanish.
    """
    n, m = spec.n, spec.m
    k_top = n + 3 if verify else n + 1
    a = [Fraction(0)] + [descent_kernel(n, m, k) for k in range(1, k_top + 1)]
    one_minus_t = [Fraction(binom(n + 1, j) * (-1) ** j) for j in range(n + 2)]
    poly = poly_mul(one_minus_t, a)[: k_top + 1]
    poly = [c / 2 ** n for c in poly]
    if verify:
        stray = [j for j in [0, *range(n + 1, k_top + 1)] if poly[j] != 0]
        if stray:
            raise ArithmeticError(f"descent polynomial has nonzero coefficients at t^{stray}")
    support = list(range(n))
    probs = [poly[j + 1] for j in support]
    return DiscreteDist("descents", support, probs, n=n, m=m)


def descent_moments(spec: ShelfSpec) -> tuple[Fraction, Fraction]:
    """Mean (n-1)/2 and variance (n+1)/12 + (n-2)/(6 m^2) of d(w^-1)."""
    n, m = spec.n, spec.m
    if n < 2:
        raise ValueError("descent moments need n >= 2")
    return Fraction(n - 1, 2), Fraction(n + 1, 12) + Fraction(n - 2, 6 * m * m)
