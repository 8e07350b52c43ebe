"""Counts of ordered pairs of perfect matchings of K_n by overlap size.

``m_k`` is the number of ordered pairs ``(H1, H2)`` of perfect matchings of
the complete graph with ``|H1 & H2| = k``. Disjoint pairs are counted through
the exponential generating function of alternating cycles,
``F(z) = -(log(1 - z^2) + z^2) / 2``; ``exp(F)`` generates disjoint pairs.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath as mp

from .config import DEFAULT_LIMITS, MP_DPS, Limits
from .counting import perfect_matchings
from .errors import CapExceeded, DomainError
from .graph import Graph
from .series import series_exp, series_log


def pm_count_complete(n: int) -> int:
    """``n! / ((n/2)! 2^(n/2))``; 0 for odd ``n``."""
    if n % 2:
        return 0
    return math.factorial(n) // (math.factorial(n // 2) * 2 ** (n // 2))


@dataclass(frozen=True)
class OverlapTable:
    n: int
    counts: tuple[int, ...]  # counts[k] = m_k, k = 0..n/2

    def __getitem__(self, k: int) -> int:
        return self.counts[k]

    @property
    def total(self) -> int:
        return sum(self.counts)


def pm_pair_counts_bruteforce(n: int, limits: Limits = DEFAULT_LIMITS) -> OverlapTable:
    """Tabulate ``m_k`` by looping over all ordered pairs of perfect matchings."""
    if n % 2 or n < 0:
        raise DomainError("n must be even and non-negative")
    if n > limits.pair_bruteforce_n:
        raise CapExceeded(f"n={n} exceeds brute-force cap {limits.pair_bruteforce_n}")
    index = {}
    for u in range(n):
        for v in range(u + 1, n):
            index[(u, v)] = len(index)
    masks = [sum(1 << index[e] for e in pm) for pm in perfect_matchings(Graph.complete(n))]
    counts = [0] * (n // 2 + 1)
    for a in masks:
        for b in masks:
            counts[(a & b).bit_count()] += 1
    return OverlapTable(n, tuple(counts))


def _alternating_cycle_egf(size: int) -> list[Fraction]:
    one_minus_z2 = [Fraction(0)] * size
    one_minus_z2[0] = Fraction(1)
    if size > 2:
        one_minus_z2[2] = Fraction(-1)
    log_part = series_log(one_minus_z2)
    F = [-c / 2 for c in log_part]
    if size > 2:
        F[2] -= Fraction(1, 2)
    return F


def egf_disjoint_pairs(max_m: int) -> list[Fraction]:
    """Coefficients of ``exp(F(z))`` through ``z^(2 max_m)``, as exact rationals."""
    if max_m < 0:
        raise DomainError("max_m must be non-negative")
    return series_exp(_alternating_cycle_egf(2 * max_m + 1))


@lru_cache(maxsize=None)
def _disjoint_table(max_m: int) -> tuple[Fraction, ...]:
    return tuple(egf_disjoint_pairs(max_m))


def disjoint_pair_count(size: int) -> int:
    """``D(size)``: ordered pairs of edge-disjoint perfect matchings of K_size."""
    if size < 0:
        raise DomainError("size must be non-negative")
    if size % 2:
        return 0
    m = size // 2
    # round up to a power of two so repeated calls share one cached series
    coeffs = _disjoint_table(max(8, 1 << max(m - 1, 0).bit_length()))
    val = coeffs[size] * math.factorial(size)
    assert val.denominator == 1
    return int(val)


def pm_pair_count_exact(n: int, k: int) -> int:
    """``C(n,2k) * (2k)!/(2^k k!) * D(n-2k)``."""
    if n % 2 or n < 0:
        raise DomainError("n must be even and non-negative")
    if not 0 <= k <= n // 2:
        raise DomainError("need 0 <= k <= n/2")
    return math.comb(n, 2 * k) * pm_count_complete(2 * k) * disjoint_pair_count(n - 2 * k)


def pm_pair_counts_exact(n: int) -> OverlapTable:
    return OverlapTable(n, tuple(pm_pair_count_exact(n, k) for k in range(n // 2 + 1)))


def log_pm_pair_count_asymptotic(n, k):
    """Log of ``n! / (2^k k! sqrt(e*pi*(n-2k)/2))`` as an mpf."""
    if not 0 <= k < n / 2:
        raise DomainError("need 0 <= k < n/2")
    with mp.workdps(MP_DPS):
        n = mp.mpf(n)
        k = mp.mpf(k)
        return (mp.loggamma(n + 1) - k * mp.log(2) - mp.loggamma(k + 1)
                - mp.log(mp.e * mp.pi * (n - 2 * k) / 2) / 2)


def pm_pair_count_asymptotic(n: int, k: int) -> float:
    return float(mp.exp(log_pm_pair_count_asymptotic(n, k)))
