import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from pmlab.errors import DegenerateInput, DomainError
from pmlab.stats import (chi_square_two_sample, chi_square_uniform, empirical_moments,
                         ks_distance_normal, loglog_slope, standardize_Y)


def test_chi_square_examples():
    assert chi_square_uniform([5, 5, 5, 5]) == (0.0, 1.0)
    stat, p = chi_square_uniform([10, 0])
    assert stat == 10
    assert p == pytest.approx(0.0015654022580025, rel=1e-9)
    with pytest.raises(DegenerateInput):
        chi_square_uniform([7])
    with pytest.raises(DegenerateInput):
        chi_square_uniform([0, 0])


def test_chi_square_against_scipy():
    from scipy.stats import chisquare

    counts = [12, 7, 9, 15, 3, 10]
    stat, p = chi_square_uniform(counts)
    ref = chisquare(counts)
    assert stat == pytest.approx(ref.statistic)
    assert p == pytest.approx(ref.pvalue, rel=1e-10)


@given(st.lists(st.integers(0, 50), min_size=2, max_size=12).filter(lambda c: sum(c) > 0),
       st.randoms(use_true_random=False))
def test_chi_square_permutation_invariant(counts, rnd):
    shuffled = counts[:]
    rnd.shuffle(shuffled)
    a, b = chi_square_uniform(counts), chi_square_uniform(shuffled)
    assert a[0] == pytest.approx(b[0]) and a[1] == pytest.approx(b[1])


def test_two_sample():
    stat, p = chi_square_two_sample([50, 50], [50, 50])
    assert stat == 0 and p == 1
    _, p = chi_square_two_sample([100, 0], [0, 100])
    assert p < 1e-10


def test_standardize(ensembles):
    assert np.all(standardize_Y([3.0, 3.0], 6, 3, EY=3.0) == 0)
    ens = ensembles(6, 3)
    z = standardize_Y(ens.Y, 6, 3, EY=30 / 7)
    var = float(np.mean(z ** 2))
    assert var == pytest.approx((24 / 49) * 162 / (900 / 49))
    with pytest.raises(DomainError):
        standardize_Y([], 6, 3)


@given(st.floats(-5, 5))
def test_standardize_affine(c):
    ys = np.array([1.0, 4.0, 9.0])
    scale = 4.0 / math.sqrt(6 * 27)
    shifted = standardize_Y(ys + c * scale, 6, 3, EY=4.0)
    assert np.allclose(shifted, standardize_Y(ys, 6, 3, EY=4.0) + c)


def test_empirical_moments():
    assert empirical_moments([1, 1, 1]).variance == 0
    s = empirical_moments([0, 1])
    assert (s.mean, s.variance) == (0.5, 0.5)
    assert abs(empirical_moments([-3, -1, 0, 1, 3]).skewness) < 1e-15
    with pytest.raises(DegenerateInput):
        empirical_moments([2])


def test_ks_distance():
    z = np.random.default_rng(0).standard_normal(100_000)
    assert ks_distance_normal(z) < 0.01
    assert ks_distance_normal(np.zeros(20)) == 0.5
    with pytest.raises(DegenerateInput):
        ks_distance_normal(np.zeros(5))


def test_loglog_slope():
    xs = [1.0, 10.0, 100.0, 1000.0]
    assert loglog_slope(xs, [x ** -4 for x in xs])[0] == pytest.approx(-4)
    assert loglog_slope(xs, [7.0] * 4)[0] == pytest.approx(0, abs=1e-12)
    with pytest.raises(DomainError):
        loglog_slope(xs, [1.0, -1.0, 1.0, 1.0])
    with pytest.raises(DomainError):
        loglog_slope([1.0, 2.0], [1.0, 2.0])
