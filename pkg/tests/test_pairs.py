from fractions import Fraction
from math import factorial

import pytest

from pmlab.errors import CapExceeded, DomainError
from pmlab.pairs import (disjoint_pair_count, egf_disjoint_pairs, pm_count_complete,
                         pm_pair_count_asymptotic, pm_pair_count_exact, pm_pair_counts_bruteforce,
                         pm_pair_counts_exact)
from pmlab.series import series_exp, series_log, series_mul


def test_bruteforce_examples():
    assert pm_pair_counts_bruteforce(4).counts == (6, 0, 3)
    assert pm_pair_counts_bruteforce(2).counts == (0, 1)
    assert pm_pair_counts_bruteforce(6).total == 225
    with pytest.raises(CapExceeded):
        pm_pair_counts_bruteforce(12)


def test_disjoint_counts():
    assert disjoint_pair_count(0) == 1
    assert disjoint_pair_count(2) == 0
    assert disjoint_pair_count(4) == 6
    assert disjoint_pair_count(6) == 120
    assert disjoint_pair_count(5) == 0


def test_egf_odd_coefficients_vanish():
    coeffs = egf_disjoint_pairs(12)
    assert len(coeffs) == 25
    assert all(c == 0 for c in coeffs[1::2])


def test_egf_matches_closed_form_product():
    # exp(-z^2/2) / sqrt(1 - z^2): compare via square: (series)^2 * (1 - z^2) = exp(-z^2)
    m = 10
    f = egf_disjoint_pairs(m)
    sq = series_mul(f, f)[: 2 * m + 1]
    one_minus_z2 = [Fraction(1), Fraction(0), Fraction(-1)] + [Fraction(0)] * (2 * m - 2)
    lhs = series_mul(sq, one_minus_z2)[: 2 * m + 1]
    rhs = [Fraction(0)] * (2 * m + 1)
    for j in range(m + 1):
        rhs[2 * j] = Fraction((-1) ** j, factorial(j))
    assert lhs == rhs


def test_series_log_exp_inverse():
    a = [Fraction(1), Fraction(2), Fraction(-3, 4), Fraction(5)]
    assert series_exp(series_log(a)) == a


@pytest.mark.parametrize("n", [2, 4, 6, 8, 10])
def test_exact_equals_bruteforce(n):
    assert pm_pair_counts_exact(n).counts == pm_pair_counts_bruteforce(n).counts


def test_exact_examples_and_invariants():
    assert pm_pair_count_exact(4, 0) == 6
    assert pm_pair_count_exact(4, 2) == 3
    assert pm_pair_count_exact(6, 3) == 15
    for n in (12, 20, 30):
        t = pm_pair_counts_exact(n)
        assert t.total == pm_count_complete(n) ** 2
        assert t[n // 2] == pm_count_complete(n)
    with pytest.raises(DomainError):
        pm_pair_count_exact(5, 0)
    with pytest.raises(DomainError):
        pm_pair_count_exact(6, 4)


@pytest.mark.parametrize("n,k", [(10, 0), (10, 2)])
def test_asymptotic_ratio(n, k):
    ratio = pm_pair_count_exact(n, k) / pm_pair_count_asymptotic(n, k)
    assert abs(ratio - 1) <= 2 / (n - 2 * k)


def test_asymptotic_ratio_improves_with_n():
    gaps = [abs(pm_pair_count_exact(n, 0) / pm_pair_count_asymptotic(n, 0) - 1) for n in (6, 8, 10)]
    assert gaps[0] > gaps[1] > gaps[2]
    with pytest.raises(DomainError):
        pm_pair_count_asymptotic(10, 5)
