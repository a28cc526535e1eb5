import math
from itertools import combinations, permutations

import pytest
from hypothesis import given, strategies as st

from shelfshuffle.permstat import (
    Partition,
    Permutation,
    SignedPermutation,
    all_permutations,
    complement,
    cycle_counts,
    cycle_type,
    cyclic_descents,
    descents,
    iter_signed,
    partitions,
    peaks,
    reverse,
    rsk_shape,
    syt_count,
    valley_table,
    valleys,
)

perms = st.integers(1, 9).flatmap(lambda n: st.permutations(range(1, n + 1))).map(lambda p: Permutation(tuple(p)))


def brute_valleys(w):
    s = list(w)
    return sum(1 for i in range(1, len(s) - 1) if s[i - 1] > s[i] < s[i + 1])


def eulerian(n, k):
    if n == 0:
        return int(k == 0)
    if k < 0 or k >= n:
        return 0
    return (k + 1) * eulerian(n - 1, k) + (n - k) * eulerian(n - 1, k - 1)


def longest_monotone(seq, increasing=True):
    for size in range(len(seq), 0, -1):
        for idx in combinations(range(len(seq)), size):
            vals = [seq[i] for i in idx]
            if all((a < b) if increasing else (a > b) for a, b in zip(vals, vals[1:])):
                return size
    return 0


def count_syt(shape):
    """Count standard Young tableaux by removing the largest entry from a corner, recursively."""
    shape = tuple(p for p in shape if p)
    if sum(shape) <= 1:
        return 1
    total = 0
    for i, row in enumerate(shape):
        below = shape[i + 1] if i + 1 < len(shape) else 0
        if row > below:
            total += count_syt(shape[:i] + (row - 1,) + shape[i + 1:])
    return total


class TestPermutation:
    def test_parse_and_render(self):
        w = Permutation.parse("3, 1,2")
        assert w.mapping == (3, 1, 2) and str(w) == "3,1,2" and w(1) == 3 and w.n == 3

    @pytest.mark.parametrize("text", ["", "1,2,,3", "1,2,x", "0,1", "1,3", "1,1,2", "2,2"])
    def test_parse_rejects(self, text):
        with pytest.raises(ValueError):
            Permutation.parse(text)

    def test_duplicate_message(self):
        with pytest.raises(ValueError, match="duplicate"):
            Permutation.parse("1,1,2")

    @given(perms)
    def test_inverse(self, w):
        assert w @ w.inverse() == Permutation.identity(w.n) == w.inverse() @ w

    @given(st.integers(1, 6).flatmap(lambda n: st.tuples(*[st.permutations(range(1, n + 1))] * 3)))
    def test_compose_associative(self, triple):
        a, b, c = (Permutation(tuple(p)) for p in triple)
        assert (a @ b) @ c == a @ (b @ c)
        assert all((a @ b)(i) == a(b(i)) for i in range(1, a.n + 1))

    def test_all_permutations_count(self):
        assert len(set(all_permutations(5))) == 120


class TestStatistics:
    @given(perms)
    def test_valleys_peaks_symmetries(self, w):
        assert valleys(w) == brute_valleys(w)
        assert valleys(w) == peaks(complement(w))
        assert valleys(reverse(w)) == valleys(w)
        assert peaks(w) - valleys(w) in (-1, 0, 1)
        assert valleys(w) <= (w.n - 1) // 2
        assert descents(w)[0] + descents(reverse(w))[0] == w.n - 1

    def test_valley_table_matches_enumeration(self):
        table = valley_table(8)
        for n in range(1, 8):
            counts = [0] * (n // 2 + 1)
            for w in all_permutations(n):
                counts[valleys(w)] += 1
            assert [table(n, k) for k in range(len(counts))] == counts
            assert sum(table.row(n)) == math.factorial(n)
            assert table(n, 0) == 2 ** (n - 1)
        assert table(8, -1) == 0 and table(8, 10) == 0

    def test_descents_are_eulerian(self):
        for n in range(1, 7):
            counts = [0] * n
            for w in all_permutations(n):
                counts[descents(w)[0]] += 1
            assert counts == [eulerian(n, k) for k in range(n)]

    def test_descent_set(self):
        assert descents(Permutation((3, 1, 2, 5, 4))) == (2, frozenset({1, 4}))

    def test_cyclic_descent_example(self):
        assert cyclic_descents(SignedPermutation((3, 1, -2, 4, 5))) == 3

    def test_cyclic_descents_identity_and_negated(self):
        assert cyclic_descents(SignedPermutation((1, 2, 3))) == 1
        assert cyclic_descents(SignedPermutation((-1, -2, -3))) == 3
        assert cyclic_descents(SignedPermutation((-3, -2, -1))) == 1
        assert cyclic_descents(SignedPermutation((3, 2, 1))) == 3

    def test_signed(self):
        s = SignedPermutation.parse("2,-3,1")
        assert s.inverse().mapping == (3, 1, -2)
        assert s.unsigned() == Permutation((2, 3, 1))
        assert len(list(SignedPermutation.all_signings(Permutation((2, 1))))) == 4
        assert len(list(iter_signed(3))) == 2 ** 3 * 6
        with pytest.raises(ValueError):
            SignedPermutation((1, -1))

    @given(perms)
    def test_cycles(self, w):
        ct = cycle_type(w)
        assert sum(ct) == w.n and list(ct) == sorted(ct, reverse=True)
        assert cycle_type(w.inverse()) == ct
        counts = cycle_counts(w)
        assert sum(i * c for i, c in counts.items()) == w.n
        assert counts[1] == sum(1 for i in range(1, w.n + 1) if w(i) == i)

    @given(perms)
    def test_rsk_shape(self, w):
        lam = rsk_shape(w)
        seq = list(w)
        assert lam.size == w.n
        assert lam.parts[0] == longest_monotone(seq, True)
        assert len(lam) == longest_monotone(seq, False)
        assert rsk_shape(w.inverse()) == lam
        assert rsk_shape(reverse(w)) == lam.conjugate()

    def test_rsk_is_bijective_by_counts(self):
        for n in range(1, 7):
            counts = {}
            for w in all_permutations(n):
                counts[rsk_shape(w)] = counts.get(rsk_shape(w), 0) + 1
            for lam, c in counts.items():
                assert c == syt_count(lam) ** 2


class TestPartitions:
    def test_partition_numbers(self):
        assert [sum(1 for _ in partitions(n)) for n in range(11)] == [1, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42]

    def test_order_and_render(self):
        assert [str(p) for p in partitions(3)] == ["(3)", "(2,1)", "(1,1,1)"]

    def test_hook_length_matches_enumeration(self):
        for n in range(1, 9):
            for lam in partitions(n):
                assert syt_count(lam) == count_syt(lam.parts)

    def test_conjugate_involution(self):
        for lam in partitions(7):
            assert lam.conjugate().conjugate() == lam
            assert lam.conjugate().size == 7

    def test_rejects_unsorted(self):
        with pytest.raises(ValueError):
            Partition((1, 2))
