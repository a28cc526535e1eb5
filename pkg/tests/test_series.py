from collections import Counter
from fractions import Fraction
from math import comb, factorial

import pytest
from hypothesis import given, settings, strategies as st

from shelfshuffle.exact import ShelfSpec
from shelfshuffle.machine import shelf_exact_dist
from shelfshuffle.permstat import all_permutations, cycle_counts, descents, partitions, rsk_shape, syt_count
from shelfshuffle.powerseries import TruncationError
from shelfshuffle.series import (
    DiscreteDist,
    cycle_count_dist,
    cycle_limit_law,
    cycle_product_series,
    descent_dist,
    descent_kernel,
    descent_moments,
    f_im,
    fim_table,
    fixed_point_limit_law,
    mobius,
    q_series,
    rsk_shape_dist,
    schur_s,
    total_variation,
)

SMALL = [(n, m) for n in range(1, 6) for m in (1, 2)] + [(6, 2), (4, 3)]


def enumerate_law(n, m, stat):
    out = Counter()
    for w, p in shelf_exact_dist(ShelfSpec(n, m)).items():
        out[stat(w)] += p
    return out


def eulerian_row(n):
    row = [1]
    for k in range(2, n + 1):
        row = [(j + 1) * (row[j] if j < len(row) else 0) + (k - j) * (row[j - 1] if j >= 1 else 0) for j in range(k)]
    return row


def kernel_closed_form(n, m, k):
    """[u^n] ((1+u/m)/(1-u/m))^(km) = m^-n sum_a C(km, a) C(km+n-a-1, n-a)."""
    return Fraction(sum(comb(k * m, a) * comb(k * m + n - a - 1, n - a) for a in range(n + 1)), m ** n)


class TestMobiusAndExponents:
    def test_mobius(self):
        assert [mobius(d) for d in range(1, 13)] == [1, -1, -1, 0, -1, 1, -1, 0, 0, 1, -1, 0]

    @given(st.integers(1, 30), st.integers(1, 12))
    def test_f_is_integer_and_positive(self, i, m):
        assert f_im(i, m) >= 1

    def test_small_values(self):
        assert [f_im(1, m) for m in range(1, 5)] == [1, 2, 3, 4]
        assert f_im(2, 1) == 1 and f_im(3, 1) == 1 and f_im(3, 2) == (64 - 4) // 6
        assert fim_table(2, 4).values == tuple(f_im(i, 2) for i in range(1, 5))
        with pytest.raises(ValueError):
            f_im(0, 1)

    @pytest.mark.parametrize("m", [1, 2, 5])
    def test_product_of_all_factors_is_geometric(self, m):
        series = cycle_product_series(m, 12)
        assert list(series.coeffs) == [1] * 13

    def test_truncation_guard(self):
        with pytest.raises(TruncationError):
            cycle_product_series(2, 8, i_max=5)


class TestCycles:
    @pytest.mark.parametrize("n,m", SMALL)
    @pytest.mark.parametrize("i", [1, 2, 3])
    def test_matches_enumeration(self, n, m, i):
        if i > n:
            with pytest.raises(ValueError):
                cycle_count_dist(ShelfSpec(n, m), i)
            return
        dist = cycle_count_dist(ShelfSpec(n, m), i)
        brute = enumerate_law(n, m, lambda w: cycle_counts(w)[i])
        assert dist.total() == 1
        assert {k: p for k, p in dist.as_dict().items() if p} == {k: p for k, p in brute.items() if p}

    def test_limit_law_values(self):
        law = fixed_point_limit_law(1)
        assert list(law.probs[:3]) == [Fraction(1, 3), Fraction(1, 3), Fraction(1, 6)]
        assert law.total() + law.tail == 1 and 0 <= law.tail <= Fraction(1, 10 ** 12)

    @pytest.mark.parametrize("i,m", [(1, 10), (2, 2), (1, 3)])
    def test_finite_law_approaches_limit(self, i, m):
        finite = cycle_count_dist(ShelfSpec(30, m), i)
        limit = cycle_limit_law(i, m)
        assert float(total_variation(finite, limit)) < 0.02

    def test_fixed_point_mean_52_cards(self):
        # mean fixed points: m/(2m+1) + m * (1/2m) / (1 - 1/2m) in the limit; about 1 at m = 10
        dist = cycle_count_dist(ShelfSpec(52, 10), 1)
        limit_mean = Fraction(10, 21) + Fraction(10, 19)
        assert abs(float(dist.mean()) - float(limit_mean)) < 1e-3


class TestRSK:
    def test_q_series(self):
        assert list(q_series(1, 4).coeffs) == [1, 2, 2, 2, 2]

    @pytest.mark.parametrize("n,m", SMALL)
    def test_matches_enumeration(self, n, m):
        dist = rsk_shape_dist(ShelfSpec(n, m))
        brute = enumerate_law(n, m, rsk_shape)
        assert dist.total() == 1
        assert {k: p for k, p in dist.as_dict().items() if p} == dict(brute)

    def test_three_cards_one_shelf(self):
        dist = rsk_shape_dist(ShelfSpec(3, 1))
        assert list(dist.probs) == [Fraction(1, 4), Fraction(1, 2), Fraction(1, 4)]

    @settings(max_examples=15, deadline=None)
    @given(st.integers(1, 12), st.integers(1, 8))
    def test_sums_to_one(self, n, m):
        assert rsk_shape_dist(ShelfSpec(n, m)).total() == 1

    def test_large_m_tends_to_plancherel(self):
        n = 6
        dist = rsk_shape_dist(ShelfSpec(n, 10 ** 5))
        for lam, p in dist.as_dict().items():
            assert abs(float(p) - syt_count(lam) ** 2 / factorial(n)) < 1e-3

    def test_schur_of_single_row(self):
        assert schur_s([2], 1) == q_series(1, 2)[2]


class TestDescents:
    @pytest.mark.parametrize("n,m", SMALL)
    def test_law_of_inverse_descents(self, n, m):
        dist = descent_dist(ShelfSpec(n, m))
        brute = enumerate_law(n, m, lambda w: descents(w.inverse())[0])
        assert dist.total() == 1
        assert {k: p for k, p in dist.as_dict().items() if p} == dict(brute)

    @settings(max_examples=25)
    @given(st.integers(1, 12), st.integers(1, 6), st.integers(1, 15))
    def test_kernel_closed_form(self, n, m, k):
        assert descent_kernel(n, m, k) == kernel_closed_form(n, m, k)
        assert descent_kernel(n, m, 0) == 0

    def test_eulerian_limit(self):
        for n in (4, 6, 8):
            dist = descent_dist(ShelfSpec(n, 10 ** 6))
            for k, e in enumerate(eulerian_row(n)):
                assert abs(float(dist[k]) - e / factorial(n)) < 1e-4

    @pytest.mark.parametrize("n,m", [(2, 1), (5, 2), (9, 3), (20, 7), (52, 10)])
    def test_moments(self, n, m):
        dist = descent_dist(ShelfSpec(n, m))
        assert (dist.mean(), dist.variance()) == descent_moments(ShelfSpec(n, m))

    def test_moment_guard(self):
        with pytest.raises(ValueError):
            descent_moments(ShelfSpec(1, 3))

    def test_single_card(self):
        assert list(descent_dist(ShelfSpec(1, 4)).probs) == [1]


class TestDiscreteDist:
    def test_tv_counts_tails(self):
        p = DiscreteDist("x", [0, 1], [Fraction(1, 2), Fraction(1, 2)])
        q = DiscreteDist("x", [0], [Fraction(3, 4)], tail=Fraction(1, 4))
        assert total_variation(p, q) == Fraction(1, 2)

    def test_json_and_csv(self):
        d = rsk_shape_dist(ShelfSpec(3, 1))
        js = d.to_json(3)
        assert js["support"] == ["(3)", "(2,1)", "(1,1,1)"]
        assert js["probs"][1] == {"decimal": "0.500", "exact": "1/2"}
        assert d.to_csv_rows(2) == [("(3)", "0.25"), ("(2,1)", "0.50"), ("(1,1,1)", "0.25")]
