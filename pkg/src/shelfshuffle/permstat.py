"""
Permutations, signed permutations and the statistics computed on them.

Permutations are stored in one-line notation, 1-indexed: ``w.mapping[i - 1]``
is ``w(i)``. For a deck, that reads as "position i (from the top) holds card
w(i)".

>>> w = Permutation.parse("5,1,3,6,7,2,4")
>>> valleys(w), peaks(w)
(2, 1)
>>> descents(Permutation.parse("3,1,5,4,2"))
(3, frozenset({1, 3, 4}))
"""

from __future__ import annotations

import itertools
import math
from bisect import bisect_right
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

__all__ = [
    "Permutation", "SignedPermutation", "Partition", "ValleyTable",
    "valleys", "peaks", "descents", "cyclic_descents", "cycle_type",
    "rsk_shape", "syt_count", "valley_table", "all_permutations",
    "partitions", "complement", "reverse", "cycle_counts", "iter_signed",
]


@dataclass(frozen=True)
class Permutation:
    mapping: tuple[int, ...]

    def __post_init__(self):
        mapping = tuple(int(x) for x in self.mapping)
        if sorted(mapping) != list(range(1, len(mapping) + 1)):
            raise ValueError(f"not a permutation of 1..{len(mapping)}: {mapping}")
        object.__setattr__(self, "mapping", mapping)

    @classmethod
    def identity(cls, n: int) -> Permutation:
        return cls(tuple(range(1, n + 1)))

    @classmethod
    def parse(cls, text: str) -> Permutation:
        """Parse comma-separated one-line notation, e.g. ``"2,3,1"``."""
        try:
            entries = [int(tok) for tok in text.replace(" ", "").split(",")]
        except ValueError as exc:
            raise ValueError(f"malformed permutation text: {text!r}") from exc
        if len(set(entries)) != len(entries):
            raise ValueError(f"duplicate entries in permutation: {text!r}")
        return cls(tuple(entries))

    @property
    def n(self) -> int:
        return len(self.mapping)

    def __len__(self) -> int:
        return len(self.mapping)

    def __call__(self, i: int) -> int:
        return self.mapping[i - 1]

    def __iter__(self) -> Iterator[int]:
        return iter(self.mapping)

    def __str__(self) -> str:
        return ",".join(map(str, self.mapping))

    def inverse(self) -> Permutation:
        inv = [0] * self.n
        for i, v in enumerate(self.mapping, start=1):
            inv[v - 1] = i
        return Permutation(tuple(inv))

    def compose(self, other: Permutation) -> Permutation:
        """Functional composition ``(self o other)(i) = self(other(i))``."""
        if other.n != self.n:
            raise ValueError("cannot compose permutations of different sizes")
        return Permutation(tuple(self.mapping[j - 1] for j in other.mapping))

    __matmul__ = compose


@dataclass(frozen=True)
class SignedPermutation:
    """An element of the hyperoctahedral group B_n, one-line with signs."""
    mapping: tuple[int, ...]

    def __post_init__(self):
        mapping = tuple(int(x) for x in self.mapping)
        if 0 in mapping or sorted(abs(x) for x in mapping) != list(range(1, len(mapping) + 1)):
            raise ValueError(f"not a signed permutation: {mapping}")
        object.__setattr__(self, "mapping", mapping)

    @classmethod
    def parse(cls, text: str) -> SignedPermutation:
        try:
            return cls(tuple(int(tok) for tok in text.replace(" ", "").split(",") if tok))
        except ValueError as exc:
            raise ValueError(f"malformed signed permutation text: {text!r}") from exc

    @property
    def n(self) -> int:
        return len(self.mapping)

    def __str__(self) -> str:
        return ",".join(map(str, self.mapping))

    def inverse(self) -> SignedPermutation:
        inv = [0] * self.n
        for i, v in enumerate(self.mapping, start=1):
            inv[abs(v) - 1] = i if v > 0 else -i
        return SignedPermutation(tuple(inv))

    def unsigned(self) -> Permutation:
        return Permutation(tuple(abs(v) for v in self.mapping))

    @classmethod
    def all_signings(cls, w: Permutation) -> Iterator[SignedPermutation]:
        for signs in itertools.product((1, -1), repeat=w.n):
            yield cls(tuple(s * v for s, v in zip(signs, w.mapping)))


@dataclass(frozen=True, order=True)
class Partition:
    parts: tuple[int, ...]

    def __post_init__(self):
        parts = tuple(int(p) for p in self.parts if p != 0)
        if any(p < 0 for p in parts) or any(a < b for a, b in zip(parts, parts[1:])):
            raise ValueError(f"parts must be positive and weakly decreasing: {self.parts}")
        object.__setattr__(self, "parts", parts)

    @property
    def size(self) -> int:
        return sum(self.parts)

    def __len__(self) -> int:
        return len(self.parts)

    def __str__(self) -> str:
        return "(" + ",".join(map(str, self.parts)) + ")"

    def conjugate(self) -> Partition:
        if not self.parts:
            return self
        return Partition(tuple(sum(1 for p in self.parts if p > j) for j in range(self.parts[0])))


def all_permutations(n: int) -> Iterator[Permutation]:
    """All of S_n in lexicographic order."""
    for p in itertools.permutations(range(1, n + 1)):
        yield Permutation(p)


def complement(w: Permutation) -> Permutation:
    n = w.n
    return Permutation(tuple(n + 1 - v for v in w.mapping))


def reverse(w: Permutation) -> Permutation:
    return Permutation(w.mapping[::-1])


def valleys(w: Permutation | Sequence[int]) -> int:
    """Number of interior positions i with w(i-1) > w(i) < w(i+1)."""
    seq = w.mapping if isinstance(w, Permutation) else w
    return sum(1 for a, b, c in zip(seq, seq[1:], seq[2:]) if a > b < c)


def peaks(w: Permutation | Sequence[int]) -> int:
    seq = w.mapping if isinstance(w, Permutation) else w
    return sum(1 for a, b, c in zip(seq, seq[1:], seq[2:]) if a < b > c)


def descents(w: Permutation | Sequence[int]) -> tuple[int, frozenset[int]]:
    """Return ``(d(w), D(w))`` where D(w) = {i < n : w(i) > w(i+1)}."""
    seq = w.mapping if isinstance(w, Permutation) else w
    dset = frozenset(i for i, (a, b) in enumerate(zip(seq, seq[1:]), start=1) if a > b)
    return len(dset), dset


def _cd_key(v: int) -> tuple[int, int]:
    # total order 1 < 2 < ... < n < ... < -2 < -1
    return (0, v) if v > 0 else (1, v)


def cyclic_descents(w: SignedPermutation) -> int:
    """
    Cyclic descent count of a signed permutation.

    Interior positions use the order 1 < 2 < ... < -2 < -1; position n counts
    when w(n) < 0 and position 1 counts (additionally) when w(1) > 0.

    >>> cyclic_descents(SignedPermutation((3, 1, -2, 4, 5)))
    3
    """
    seq = w.mapping
    count = sum(1 for a, b in zip(seq, seq[1:]) if _cd_key(a) > _cd_key(b))
    if seq[-1] < 0:
        count += 1
    if seq[0] > 0:
        count += 1
    return count


def cycle_type(w: Permutation) -> tuple[int, ...]:
    """Cycle lengths, sorted decreasingly."""
    seen = [False] * (w.n + 1)
    lengths = []
    for start in range(1, w.n + 1):
        if seen[start]:
            continue
        length, j = 0, start
        while not seen[j]:
            seen[j] = True
            j = w.mapping[j - 1]
            length += 1
        lengths.append(length)
    return tuple(sorted(lengths, reverse=True))


def cycle_counts(w: Permutation) -> Counter:
    """Map i -> N_i(w), the number of i-cycles."""
    return Counter(cycle_type(w))


def rsk_shape(w: Permutation | Sequence[int]) -> Partition:
    """Shape of the RSK insertion tableau, by row insertion."""
    seq = w.mapping if isinstance(w, Permutation) else tuple(w)
    rows: list[list[int]] = []
    for x in seq:
        for row in rows:
            k = bisect_right(row, x)
            if k == len(row):
                row.append(x)
                break
            row[k], x = x, row[k]
        else:
            rows.append([x])
    return Partition(tuple(len(r) for r in rows))


def syt_count(shape: Partition | Sequence[int]) -> int:
    """Number of standard Young tableaux of the given shape (hook lengths)."""
    lam = shape if isinstance(shape, Partition) else Partition(tuple(shape))
    if not lam.parts:
        return 1
    conj = lam.conjugate().parts
    hooks = 1
    for i, row in enumerate(lam.parts):
        for j in range(row):
            hooks *= (row - j - 1) + (conj[j] - i - 1) + 1
    return math.factorial(lam.size) // hooks


def partitions(n: int, max_part: int | None = None) -> Iterator[Partition]:
    """Partitions of n in reverse-lexicographic order: (n), (n-1,1), ..."""
    if max_part is None:
        max_part = n
    if n == 0:
        yield Partition(())
        return
    for first in range(min(n, max_part), 0, -1):
        for rest in partitions(n - first, first):
            yield Partition((first,) + rest.parts)


@dataclass(frozen=True)
class ValleyTable:
    """v(n, k): number of permutations of S_n with exactly k valleys."""
    n_max: int
    counts: tuple[tuple[int, ...], ...] = field(repr=False)

    def __call__(self, n: int, k: int) -> int:
        if not 1 <= n <= self.n_max:
            raise ValueError(f"n={n} outside table range 1..{self.n_max}")
        row = self.counts[n - 1]
        return row[k] if 0 <= k < len(row) else 0

    def row(self, n: int) -> tuple[int, ...]:
        return self.counts[n - 1]


def valley_table(n_max: int) -> ValleyTable:
    """Fill v(n,k) = (2k+2) v(n-1,k) + (n-2k) v(n-1,k-1) from v(1,0) = 1."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    rows = [(1,)]
    for n in range(2, n_max + 1):
        prev = rows[-1]
        width = (n - 1) // 2 + 1
        get = lambda k: prev[k] if 0 <= k < len(prev) else 0  # noqa: E731
        rows.append(tuple((2 * k + 2) * get(k) + (n - 2 * k) * get(k - 1) for k in range(width)))
    return ValleyTable(n_max, tuple(rows))


def iter_signed(n: int) -> Iterable[SignedPermutation]:
    for w in all_permutations(n):
        yield from SignedPermutation.all_signings(w)
