"""
Monte Carlo randomness audits of a shuffled deck.

Every experiment draws decks through :func:`shelfshuffle.machine.chunk_decks`,
whose chunk-k-uses-stream-k layout makes reports independent of the number
of worker threads. Reports carry the seed, trial count and generator version
needed to reproduce them bit for bit.
"""

from __future__ import annotations

import math
from bisect import bisect_left, bisect_right
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence, Union

import numpy as np

from .exact import ShelfSpec
from .machine import chunk_decks
from .rng import CHUNK_SIZE, GENERATOR_VERSION

__all__ = [
    "UniformSpec", "McReport", "guess_sequence", "guessing_experiment",
    "uniform_guess_moments", "top_card_test", "color_change_test",
    "spacings_test", "longest_cycles_stat", "compare_longest_cycles",
]


@dataclass(frozen=True)
class UniformSpec:
    """A perfectly shuffled deck of n cards."""
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")


Model = Union[ShelfSpec, UniformSpec]


@dataclass
class McReport:
    statistic: str
    trials: int
    seed: int
    mean: float
    variance: float  # sample variance (ddof=1); 0 for a single trial
    histogram: dict
    stderr: float
    model: str = ""
    generator: str = GENERATOR_VERSION
    chunk_size: int = CHUNK_SIZE
    extras: dict = field(default_factory=dict)

    @property
    def sd(self) -> float:
        return math.sqrt(self.variance)

    def to_json(self) -> dict:
        return {
            "statistic": self.statistic,
            "model": self.model,
            "trials": self.trials,
            "seed": self.seed,
            "generator": self.generator,
            "chunk_size": self.chunk_size,
            "mean": self.mean,
            "variance": self.variance,
            "stderr": self.stderr,
            "histogram": {str(k): v for k, v in self.histogram.items()},
            "extras": self.extras,
        }


def _describe(model: Model) -> str:
    if isinstance(model, UniformSpec):
        return f"uniform(n={model.n})"
    return f"shelf(n={model.n},m={model.m})"


def _report(statistic: str, values: np.ndarray, model: Model, seed: int,
            bins: Sequence[int] | None = None, **extras) -> McReport:
    values = np.asarray(values)
    trials = int(values.size)
    if trials == 0:
        raise ValueError("trials must be >= 1")
    mean = float(values.mean())
    variance = float(values.var(ddof=1)) if trials > 1 else 0.0
    if bins is None:
        uniq, counts = np.unique(values, return_counts=True)
        histogram = {int(u): int(c) for u, c in zip(uniq.tolist(), counts.tolist())}
    else:
        counts = np.bincount(values.astype(np.int64), minlength=max(bins) + 1)
        histogram = {int(b): int(counts[b]) for b in bins}
    return McReport(statistic, trials, seed, mean, variance, histogram,
                    math.sqrt(variance / trials), model=_describe(model), extras=dict(extras))


def _per_trial(model: Model, trials: int, seed: int, fn: Callable[[np.ndarray], np.ndarray],
               workers: int = 1) -> np.ndarray:
    """Apply ``fn`` to each chunk of decks; chunk order, not thread timing, fixes the result."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    m = None if isinstance(model, UniformSpec) else model.m
    starts = list(range(0, trials, CHUNK_SIZE))

    def run(k: int) -> np.ndarray:
        rows = min(CHUNK_SIZE, trials - starts[k])
        decks = chunk_decks(model.n, m, seed, k, rows)
        return np.asarray(fn(decks))

    if workers > 1 and len(starts) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, range(len(starts))))
    else:
        parts = [run(k) for k in range(len(starts))]
    return np.concatenate(parts, axis=0)


# -- guessing with feedback ------------------------------------------------------------

def guess_sequence(deck: Sequence[int]) -> int:
    """
    Play the run-following guessing strategy through a deck revealed top-down
    and return the number of correct guesses.

    Start ascending from card 1: guess the smallest unseen card above the
    last card shown. After a descent (shown card below the previous one)
    guess the largest unseen card below the last card shown, until an ascent
    switches back. When the wanted side is empty, guess the unseen card
    nearest to it.

    >>> guess_sequence([1, 2, 3, 4])
    4
    >>> guess_sequence([2, 1])
    1
    """
    available = sorted(int(c) for c in deck)
    last, ascending, correct = 0, True, 0
    for card in deck:
        card = int(card)
        if ascending:
            k = bisect_right(available, last)
            guess = available[k] if k < len(available) else available[-1]
        else:
            k = bisect_left(available, last) - 1
            guess = available[k] if k >= 0 else available[0]
        if guess == card:
            correct += 1
        del available[bisect_left(available, card)]
        if last:
            if card < last:
                ascending = False
            elif card > last:
                ascending = True
        last = card
    return correct


def uniform_guess_moments(n: int) -> tuple[Fraction, Fraction]:
    """Exact mean and variance of the number of correct guesses on a uniform deck."""
    if n < 1:
        raise ValueError("n must be >= 1")
    mean = sum((Fraction(1, k) for k in range(1, n + 1)), Fraction(0))
    var = sum((Fraction(1, k) * (1 - Fraction(1, k)) for k in range(1, n + 1)), Fraction(0))
    return mean, var


def guessing_experiment(model: Model, trials: int = 10_000, seed: int = 0, workers: int = 1) -> McReport:
    values = _per_trial(model, trials, seed,
                        lambda decks: np.array([guess_sequence(row) for row in decks.tolist()]),
                        workers)
    extras = {}
    if isinstance(model, UniformSpec):
        mean, var = uniform_guess_moments(model.n)
        extras = {"exact_mean": float(mean), "exact_variance": float(var)}
    return _report("correct_guesses", values, model, seed, **extras)


# -- the three ad hoc tests --------------------------------------------------------------

def top_card_test(model: Model, trials: int = 10_000, seed: int = 0, workers: int = 1) -> McReport:
    """
    Frequency with which the original top card is still on top. Extras hold
    the frequencies of card 2 on top and of card 2 second from the top.
    """
    def fn(decks):
        out = np.zeros((decks.shape[0], 3), dtype=np.int64)
        out[:, 0] = decks[:, 0] == 1
        if decks.shape[1] > 1:
            out[:, 1] = decks[:, 0] == 2
            out[:, 2] = decks[:, 1] == 2
        return out

    values = _per_trial(model, trials, seed, fn, workers)
    extras = {}
    for name, col in (("card2_on_top", 1), ("card2_second", 2)):
        p = float(values[:, col].mean())
        extras[name] = p
        extras[name + "_stderr"] = math.sqrt(p * (1 - p) / trials) if trials > 1 else 0.0
    return _report("top_card_stays", values[:, 0], model, seed, **extras)


def color_change_test(model: Model, trials: int = 10_000, seed: int = 0, workers: int = 1) -> McReport:
    """Reds are cards 1..n/2 (on top before shuffling); count color changes down the deck."""
    if model.n % 2:
        raise ValueError("the red/black split needs an even number of cards")
    half = model.n // 2

    def fn(decks):
        red = decks <= half
        return (red[:, 1:] != red[:, :-1]).sum(axis=1)

    values = _per_trial(model, trials, seed, fn, workers)
    return _report("color_changes", values, model, seed)


def spacings_test(model: Model, trials: int = 10_000, seed: int = 0, j_max: int = 9,
                  workers: int = 1) -> dict[int, McReport]:
    """
    D_j = |position of card j - position of card j+1| for 1 <= j <= j_max,
    with unit-width histogram bins 1..n-1.
    """
    n = model.n
    if not 1 <= j_max < n:
        raise ValueError(f"j_max must be in 1..{n - 1}")

    def fn(decks):
        pos = np.argsort(decks, axis=1)  # pos[:, c-1] = 0-based position of card c
        return np.abs(pos[:, :j_max] - pos[:, 1:j_max + 1])

    values = _per_trial(model, trials, seed, fn, workers)
    bins = list(range(1, n))
    return {j: _report(f"D_{j}", values[:, j - 1], model, seed, bins=bins) for j in range(1, j_max + 1)}


def _longest_cycles(row: Sequence[int], k: int) -> list[int]:
    n = len(row)
    seen = [False] * n
    lengths = []
    for start in range(n):
        if not seen[start]:
            length, j = 0, start
            while not seen[j]:
                seen[j] = True
                j = row[j] - 1
                length += 1
            lengths.append(length)
    lengths.sort(reverse=True)
    return (lengths + [0] * k)[:k]


def longest_cycles_stat(model: Model, trials: int = 10_000, seed: int = 0, k: int = 1,
                        workers: int = 1) -> McReport:
    """Distribution of L_1/n; extras give the means of L_i/n for i <= k."""
    if k < 1:
        raise ValueError("k must be >= 1")
    n = model.n
    values = _per_trial(model, trials, seed,
                        lambda decks: np.array([_longest_cycles(row, k) for row in decks.tolist()]),
                        workers)
    frac = values / n
    extras = {f"mean_L{i + 1}_over_n": float(frac[:, i].mean()) for i in range(k)}
    report = _report("L1_over_n", frac[:, 0], model, seed, **extras)
    report.histogram = {int(v): int(c) for v, c in zip(*np.unique(values[:, 0], return_counts=True))}
    return report


def compare_longest_cycles(spec: ShelfSpec, trials: int = 10_000, seed: int = 0, k: int = 1) -> dict:
    """Shuffler vs uniform L_1/n reports and their Kolmogorov-Smirnov distance (report only)."""
    from scipy.stats import ks_2samp

    shelf = longest_cycles_stat(spec, trials, seed, k)
    unif = longest_cycles_stat(UniformSpec(spec.n), trials, seed, k)

    def sample(report: McReport) -> np.ndarray:
        return np.repeat(list(report.histogram), list(report.histogram.values())) / spec.n

    return {"shelf": shelf, "uniform": unif, "ks_distance": float(ks_2samp(sample(shelf), sample(unif)).statistic)}
