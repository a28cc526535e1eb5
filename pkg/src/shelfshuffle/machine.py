"""
Shelf-shuffler simulators, signed x-shuffles and their composition algebra.

Deck convention used throughout the package: a shuffled deck is reported as
the one-line permutation ``w`` with ``w(i)`` the card at position i from the
top, cards originally in order 1..n. Under this reading the label-sorting
description (``shelf_shuffle_from_labels``) is exactly the law of the
valley formula in :mod:`shelfshuffle.exact`; with one shelf it is uniform on
the 2^(n-1) valley-free permutations.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter, defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .exact import ShelfSpec
from .permstat import Permutation, all_permutations
from .rng import CHUNK_SIZE, RngSeed, chunk_bounds

__all__ = [
    "SignString", "ShuffleSample", "SizeGuardError", "ENUMERATION_LIMIT",
    "shelf_shuffle_from_labels", "signed_shuffle_from_labels",
    "sample_description1", "sample_description2", "sample_description3",
    "sample_machine", "sample_batch", "chunk_decks", "compose", "x_shuffle_exact_dist", "shelf_exact_dist",
    "convolve_exact", "uniform_dist", "separation_bound",
    "separation_bound_approx", "gsr_interleave", "label_sort_dist", "check_enumeration_size",
    "tent_map",
]

ENUMERATION_LIMIT = 10 ** 7

ExactDist = dict  # Permutation -> Fraction


class SizeGuardError(ValueError):
    """An exact enumeration was requested on an instance that is too large."""


@dataclass(frozen=True)
class SignString:
    signs: tuple[int, ...]

    def __post_init__(self):
        signs = tuple(int(s) for s in self.signs)
        if not signs or any(s not in (1, -1) for s in signs):
            raise ValueError(f"a sign string is a nonempty word over +1/-1, got {self.signs}")
        object.__setattr__(self, "signs", signs)

    @classmethod
    def parse(cls, text: str) -> SignString:
        table = {"+": 1, "-": -1, "−": -1}
        try:
            return cls(tuple(table[ch] for ch in text.strip()))
        except KeyError as exc:
            raise ValueError(f"sign string must contain only '+' and '-': {text!r}") from exc

    @classmethod
    def shelves(cls, m: int) -> SignString:
        """The alternating word +-+-...+- of length 2m."""
        if m < 1:
            raise ValueError("m must be >= 1")
        return cls((1, -1) * m)

    def __len__(self) -> int:
        return len(self.signs)

    def __str__(self) -> str:
        return "".join("+" if s > 0 else "-" for s in self.signs)

    def flipped(self) -> SignString:
        """(y_1..y_b)^-1 = (-y_b, ..., -y_1)."""
        return SignString(tuple(-s for s in reversed(self.signs)))

    def __mul__(self, other: SignString) -> SignString:
        return compose(self, other)


def compose(x: SignString, y: SignString) -> SignString:
    """x * y = y^{x_1} y^{x_2} ... y^{x_a}; associative, not commutative."""
    flipped = y.flipped().signs
    return SignString(tuple(itertools.chain.from_iterable(
        y.signs if s > 0 else flipped for s in x.signs)))


@dataclass(frozen=True)
class ShuffleSample:
    permutation: Permutation
    provenance: int  # description 1, 2 or 3; 0 for the physical machine model
    labels: tuple = field(default=(), compare=False)


# -- deterministic label-driven shuffles ---------------------------------------

def signed_shuffle_from_labels(labels: Sequence[int], x: SignString) -> Permutation:
    """
    Card j carries label ``labels[j-1]`` in 1..a. Packets are stacked in label
    order; packet i keeps the cards' relative order when x_i = +1 and reverses
    it when x_i = -1. Empty packets are simply empty.
    """
    a = len(x)
    packets: list[list[int]] = [[] for _ in range(a)]
    for card, lab in enumerate(labels, start=1):
        if not 1 <= lab <= a:
            raise ValueError(f"label {lab} outside 1..{a}")
        packets[lab - 1].append(card)
    deck: list[int] = []
    for sign, packet in zip(x.signs, packets):
        deck.extend(packet if sign > 0 else reversed(packet))
    return Permutation(tuple(deck))


def shelf_shuffle_from_labels(labels: Sequence[int], m: int | None = None) -> Permutation:
    """
    Label-sorting form of the m-shelf shuffle: odd labels keep order, even
    labels reverse it. ``m`` defaults to the smallest value covering the labels.

    >>> str(shelf_shuffle_from_labels([2, 1, 1, 4, 3, 3, 1, 2, 4, 3, 4, 1], m=2))
    '2,3,7,12,8,1,5,6,10,11,9,4'
    """
    if m is None:
        m = max(1, (max(labels) + 1) // 2)
    return signed_shuffle_from_labels(labels, SignString.shelves(m))


def gsr_interleave(packets: Sequence[Sequence[int]], rng: np.random.Generator) -> list[int]:
    """Drop cards one at a time from the bottoms of the packets, choosing a
    packet with probability proportional to its current size. Every
    interleaving is equally likely. Returns the merged deck top-down."""
    stacks = [list(p) for p in packets]
    sizes = [len(p) for p in stacks]
    total = sum(sizes)
    out: list[int] = []
    for u in rng.random(total).tolist():
        r = min(int(u * total), total - 1)
        k = 0
        while r >= sizes[k]:
            r -= sizes[k]
            k += 1
        out.append(stacks[k].pop())
        sizes[k] -= 1
        total -= 1
    out.reverse()
    return out


# -- the three sampling descriptions -------------------------------------------

def sample_description1(spec: ShelfSpec, seed: RngSeed, keep_labels: bool = False) -> ShuffleSample:
    """Uniform labels in 1..2m, then label sorting."""
    rng = seed.generator()
    labels = tuple(int(v) for v in rng.integers(1, 2 * spec.m + 1, size=spec.n))
    perm = shelf_shuffle_from_labels(labels, spec.m)
    return ShuffleSample(perm, 1, labels if keep_labels else ())


def _cut_and_riffle(rng: np.random.Generator, n: int, m: int) -> tuple[list[int], np.ndarray]:
    # independent per-card pile choice; the pile sizes are then multinomial
    counts = np.bincount(rng.integers(2 * m, size=n), minlength=2 * m)
    packets, start = [], 1
    for i, c in enumerate(counts.tolist()):
        packet = list(range(start, start + c))
        start += c
        packets.append(packet if i % 2 == 0 else packet[::-1])
    return gsr_interleave(packets, rng), counts


def sample_description2(spec: ShelfSpec, seed: RngSeed, keep_labels: bool = False) -> ShuffleSample:
    """
    Multinomial cut into 2m packets, reverse the even packets, GSR-riffle them.

    The riffled deck is the inverse shuffle; its inverse is reported so the
    result follows the package-wide deck convention.
    """
    deck, counts = _cut_and_riffle(seed.generator(), spec.n, spec.m)
    perm = Permutation(tuple(deck)).inverse()
    return ShuffleSample(perm, 2, tuple(counts.tolist()) if keep_labels else ())


def sample_machine(spec: ShelfSpec, seed: RngSeed, random_unload: bool = False) -> ShuffleSample:
    """
    The physical machine: cards leave the bottom of the deck one at a time,
    each goes to a uniformly chosen shelf, on top of or under that shelf's
    pile with probability 1/2. Shelves are unloaded shelf 1 on top, or in a
    uniformly random order when ``random_unload`` is set; the law is the same.
    """
    rng = seed.generator()
    n, m = spec.n, spec.m
    shelves = rng.integers(m, size=n).tolist()
    on_top = (rng.random(n) < 0.5).tolist()
    tops: list[list[int]] = [[] for _ in range(m)]
    bottoms: list[list[int]] = [[] for _ in range(m)]
    for step, card in enumerate(range(n, 0, -1)):
        (tops if on_top[step] else bottoms)[shelves[step]].append(card)
    order = rng.permutation(m).tolist() if random_unload else range(m)
    deck: list[int] = []
    for k in order:
        deck.extend(reversed(tops[k]))
        deck.extend(bottoms[k])
    return ShuffleSample(Permutation(tuple(deck)), 0)


def tent_map(x: np.ndarray, m: int) -> np.ndarray:
    """m tents of slope +-2m on [0, 1], peaks at 1/2m, 3/2m, ..."""
    s = 2 * m * np.asarray(x, dtype=float)
    piece = np.minimum(np.floor(s), 2 * m - 1)
    frac = s - piece
    return np.where(piece % 2 == 0, frac, 1.0 - frac)


def _ranks_from_points(points: np.ndarray, m: int) -> np.ndarray:
    """Sorted points -> 1-based ranks of their tent images, row-wise."""
    y = tent_map(points, m)
    order = np.argsort(y, axis=-1, kind="stable")
    ranks = np.empty_like(order)
    np.put_along_axis(ranks, order, np.arange(1, y.shape[-1] + 1), axis=-1)
    return ranks


def sample_description3(spec: ShelfSpec, seed: RngSeed, keep_labels: bool = False) -> ShuffleSample:
    """
    n uniform points, sorted, pushed through the m-tent map; position i of
    the output is the rank of the image of the i-th point. The rank vector is
    already in the deck convention, no inversion needed.
    """
    rng = seed.generator()
    points = np.sort(rng.random(spec.n))
    ranks = _ranks_from_points(points[None, :], spec.m)[0]
    perm = Permutation(tuple(int(r) for r in ranks))
    return ShuffleSample(perm, 3, tuple(points.tolist()) if keep_labels else ())


# -- vectorised batches --------------------------------------------------------

def _chunk_description1(rng: np.random.Generator, rows: int, n: int, m: int) -> np.ndarray:
    labels = rng.integers(1, 2 * m + 1, size=(rows, n))
    cards = np.arange(1, n + 1)
    within = np.where(labels % 2 == 1, cards, n + 1 - cards)
    key = labels * (n + 2) + within
    return np.argsort(key, axis=1, kind="stable") + 1


def _chunk_description2(rng: np.random.Generator, rows: int, n: int, m: int) -> np.ndarray:
    out = np.empty((rows, n), dtype=np.int64)
    positions = np.arange(1, n + 1)
    for r in range(rows):
        deck, _ = _cut_and_riffle(rng, n, m)
        out[r, np.asarray(deck) - 1] = positions
    return out


def _chunk_description3(rng: np.random.Generator, rows: int, n: int, m: int) -> np.ndarray:
    points = np.sort(rng.random((rows, n)), axis=1)
    return _ranks_from_points(points, m)


def _chunk_uniform(rng: np.random.Generator, rows: int, n: int, m: int) -> np.ndarray:
    return np.argsort(rng.random((rows, n)), axis=1) + 1


_CHUNKERS = {1: _chunk_description1, 2: _chunk_description2, 3: _chunk_description3, "uniform": _chunk_uniform}


def chunk_decks(n: int, m: int | None, seed: int, stream_id: int, rows: int, description=1) -> np.ndarray:
    """One chunk of decks, (rows, n), drawn from stream ``stream_id`` of ``seed``."""
    if m is None:
        description = "uniform"
    if description not in _CHUNKERS:
        raise ValueError(f"unknown description {description!r}")
    return _CHUNKERS[description](RngSeed(seed, stream_id).generator(), rows, n, m or 1)


def sample_batch(n: int, m: int | None, trials: int, seed: int, description=1,
                 workers: int = 1, chunk_size: int = CHUNK_SIZE) -> np.ndarray:
    """
    ``trials`` decks as a (trials, n) integer array, row = one-line permutation.

    ``m=None`` (or ``description="uniform"``) draws uniform permutations.
    Chunk k always uses stream k, so the result does not depend on ``workers``.
    """
    bounds = chunk_bounds(trials, chunk_size)

    def run(bound):
        sid, start, stop = bound
        return chunk_decks(n, m, seed, sid, stop - start, description)

    if workers > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, bounds))
    else:
        parts = [run(b) for b in bounds]
    if not parts:
        return np.empty((0, n), dtype=np.int64)
    return np.concatenate(parts, axis=0).astype(np.int64)


# -- exact laws on S_n -----------------------------------------------------------

def check_enumeration_size(a: int, n: int) -> None:
    """Raise SizeGuardError when a^n label vectors exceed ENUMERATION_LIMIT."""
    if a ** n > ENUMERATION_LIMIT:
        raise SizeGuardError(f"{a}^{n} label vectors exceeds the enumeration limit {ENUMERATION_LIMIT}")


def label_sort_dist(x: SignString, n: int) -> dict[Permutation, Fraction]:
    """Exact law of the label-sorted deck over all a^n label vectors."""
    a = len(x)
    check_enumeration_size(a, n)
    counts: Counter = Counter()
    for labels in itertools.product(range(1, a + 1), repeat=n):
        counts[signed_shuffle_from_labels(labels, x)] += 1
    total = a ** n
    return {w: Fraction(c, total) for w, c in counts.items()}


def x_shuffle_exact_dist(x: SignString, n: int) -> dict[Permutation, Fraction]:
    """
    Forward x-shuffle law P_x on S_n: label-sort every label vector, then
    invert the resulting deck. Permutations of probability 0 are omitted.
    """
    return {w.inverse(): p for w, p in label_sort_dist(x, n).items()}


def shelf_exact_dist(spec: ShelfSpec) -> dict[Permutation, Fraction]:
    """Exact m-shelf law by enumerating all (2m)^n label vectors."""
    return label_sort_dist(SignString.shelves(spec.m), spec.n)


def uniform_dist(n: int) -> dict[Permutation, Fraction]:
    p = Fraction(1, math.factorial(n))
    return {w: p for w in all_permutations(n)}


def convolve_exact(p: Mapping[Permutation, Fraction], q: Mapping[Permutation, Fraction]) -> dict[Permutation, Fraction]:
    """
    Law of ``v o u`` (functional composition) with v ~ p and u ~ q drawn
    independently: the deck after a pass with law p followed by a pass with
    law q. In product notation where ``ab`` applies a first, this is
    (p * q)(w) = sum_v p(v) q(w v^-1).
    """
    sizes = {w.n for w in p} | {w.n for w in q}
    if len(sizes) > 1:
        raise ValueError(f"size mismatch: permutations of sizes {sorted(sizes)}")
    out: dict[Permutation, Fraction] = defaultdict(Fraction)
    for v, pv in p.items():
        if not pv:
            continue
        for u, qu in q.items():
            if qu:
                out[v @ u] += pv * qu
    return {w: c for w, c in out.items() if c}


def separation_bound(x: SignString | int, n: int) -> tuple[float, Fraction]:
    """Birthday bound sep(P_x) <= 1 - prod_{i<n} (1 - i/a); returns (float, exact)."""
    a = len(x) if isinstance(x, SignString) else int(x)
    if a < 1:
        raise ValueError("a must be >= 1")
    prod = Fraction(1)
    for i in range(1, n):
        prod *= Fraction(a - i, a)
        if prod <= 0:
            prod = Fraction(0)
            break
    bound = 1 - prod
    return float(bound), bound


def separation_bound_approx(a: int, n: int) -> float:
    return -math.expm1(-n * (n - 1) / (2 * a))
