"""
Truncated power series with exact rational coefficients.

A series of order K stores c_0..c_K. Binary operations require equal orders;
reading a coefficient beyond K raises instead of silently returning 0, since a
too-short truncation is the usual way coefficient extraction goes wrong.

>>> u = TruncatedSeries.variable(4)
>>> ((1 + u) / (1 - u)).coeffs
(Fraction(1, 1), Fraction(2, 1), Fraction(2, 1), Fraction(2, 1), Fraction(2, 1))
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence, Union

__all__ = ["TruncatedSeries", "TruncationError", "poly_mul"]

Scalar = Union[int, Fraction]


class TruncationError(ValueError):
    """Raised when a coefficient beyond the truncation order is requested."""


def poly_mul(a: Sequence[Scalar], b: Sequence[Scalar]) -> list[Fraction]:
    """Exact (untruncated) polynomial product of coefficient lists."""
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


class TruncatedSeries:
    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[Scalar], order: int | None = None):
        cs = [Fraction(c) for c in coeffs]
        if order is not None:
            if order < 0:
                raise ValueError("order must be >= 0")
            cs = (cs + [Fraction(0)] * (order + 1))[: order + 1]
        if not cs:
            raise ValueError("a series needs at least the constant coefficient")
        self.coeffs: tuple[Fraction, ...] = tuple(cs)

    # -- construction --------------------------------------------------------
    @classmethod
    def constant(cls, c: Scalar, order: int) -> TruncatedSeries:
        return cls([c], order)

    @classmethod
    def variable(cls, order: int, scale: Scalar = 1, power: int = 1) -> TruncatedSeries:
        """The series ``scale * u**power`` truncated at ``order``."""
        cs = [Fraction(0)] * (order + 1)
        if power <= order:
            cs[power] = Fraction(scale)
        return cls(cs)

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, k: int) -> Fraction:
        if k < 0:
            return Fraction(0)
        if k > self.order:
            raise TruncationError(f"coefficient u^{k} requested from a series truncated at order {self.order}")
        return self.coeffs[k]

    def __repr__(self) -> str:
        return f"TruncatedSeries({[str(c) for c in self.coeffs]})"

    def __eq__(self, other) -> bool:
        if isinstance(other, TruncatedSeries):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.coeffs == TruncatedSeries.constant(other, self.order).coeffs
        return NotImplemented

    __hash__ = None  # type: ignore[assignment]

    def truncate(self, order: int) -> TruncatedSeries:
        if order > self.order:
            raise TruncationError(f"cannot extend a series of order {self.order} to {order}")
        return TruncatedSeries(self.coeffs[: order + 1])

    # -- arithmetic ----------------------------------------------------------
    def _coerce(self, other) -> TruncatedSeries:
        if isinstance(other, TruncatedSeries):
            if other.order != self.order:
                raise TruncationError(f"order mismatch: {self.order} vs {other.order}")
            return other
        if isinstance(other, (int, Fraction)):
            return TruncatedSeries.constant(other, self.order)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return TruncatedSeries(a + b for a, b in zip(self.coeffs, other.coeffs))

    __radd__ = __add__

    def __neg__(self) -> TruncatedSeries:
        return TruncatedSeries(-c for c in self.coeffs)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return TruncatedSeries(a - b for a, b in zip(self.coeffs, other.coeffs))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return TruncatedSeries(c * other for c in self.coeffs)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        K = self.order
        a, b = self.coeffs, other.coeffs
        out = [Fraction(0)] * (K + 1)
        for i, x in enumerate(a):
            if x:
                for j in range(K + 1 - i):
                    if b[j]:
                        out[i + j] += x * b[j]
        return TruncatedSeries(out)

    __rmul__ = __mul__

    def __pow__(self, exponent: Scalar) -> TruncatedSeries:
        """
        Raise to an integer or rational power.

        Uses the J.C.P. Miller recurrence, so cost is O(K^2) independent of the
        size of the exponent. Non-integer exponents need constant term 1.
        """
        exponent = Fraction(exponent)
        c0 = self.coeffs[0]
        if c0 == 0:
            if exponent.denominator == 1 and exponent >= 0:
                return self._pow_by_squaring(int(exponent))
            raise ZeroDivisionError("power of a series with zero constant term")
        if exponent.denominator != 1 and c0 != 1:
            raise ValueError("rational powers need constant term 1")
        f = [c / c0 for c in self.coeffs]
        K = self.order
        g = [Fraction(1)] + [Fraction(0)] * K
        for k in range(1, K + 1):
            acc = Fraction(0)
            for j in range(1, k + 1):
                if f[j]:
                    acc += ((exponent + 1) * j - k) * f[j] * g[k - j]
            g[k] = acc / k
        scale = c0 ** int(exponent) if exponent.denominator == 1 else Fraction(1)
        return TruncatedSeries(c * scale for c in g)

    def _pow_by_squaring(self, e: int) -> TruncatedSeries:
        result = TruncatedSeries.constant(1, self.order)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def reciprocal(self) -> TruncatedSeries:
        if self.coeffs[0] == 0:
            raise ZeroDivisionError("reciprocal of a series with zero constant term")
        return self ** -1

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return TruncatedSeries(c / other for c in self.coeffs)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.reciprocal()

    def __rtruediv__(self, other):
        return TruncatedSeries.constant(other, self.order) / self

    def evaluate(self, x: Scalar) -> Fraction:
        """Evaluate the truncated polynomial at x (Horner)."""
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc
