"""Goodness-of-fit, moment summaries and slope fits used by the verification suites."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np
from scipy.special import gammaincc, ndtr

from .errors import DegenerateInput, DomainError


def chi_square_uniform(counts: Sequence[int]) -> tuple[float, float]:
    """Pearson statistic against the uniform law and its upper-tail p-value.

    The p-value is ``Q((k-1)/2, stat/2)``, the regularized upper incomplete
    gamma function.
    """
    counts = np.asarray(counts, dtype=np.float64)
    k = counts.size
    total = counts.sum()
    if k < 2:
        raise DegenerateInput("need at least two classes")
    if total <= 0 or np.any(counts < 0):
        raise DegenerateInput("counts must be non-negative with a positive total")
    expected = total / k
    stat = float(np.sum((counts - expected) ** 2) / expected)
    return stat, float(gammaincc((k - 1) / 2, stat / 2))


def chi_square_two_sample(a: Sequence[int], b: Sequence[int]) -> tuple[float, float]:
    """Chi-square test of homogeneity for two count vectors over the same classes."""
    table = np.array([a, b], dtype=np.float64)
    keep = table.sum(axis=0) > 0
    table = table[:, keep]
    if table.shape[1] < 2:
        raise DegenerateInput("need at least two non-empty classes")
    rows = table.sum(axis=1, keepdims=True)
    cols = table.sum(axis=0, keepdims=True)
    expected = rows * cols / table.sum()
    stat = float(np.sum((table - expected) ** 2 / expected))
    df = table.shape[1] - 1
    return stat, float(gammaincc(df / 2, stat / 2))


def standardize_Y(samples: Sequence[float], n: int, d: int, EY: float | None = None) -> np.ndarray:
    """``(Y - E Y) / (E Y / sqrt(6 d^3))``.

    ``EY`` is the exact mean when known; otherwise the formula value is used.
    """
    samples = np.asarray(samples, dtype=np.float64)
    if samples.size == 0:
        raise DomainError("empty sample")
    if EY is None:
        from .asymptotics import expected_Y

        EY = math.exp(float(expected_Y(n, d)))
    EY = float(EY)
    if not EY > 0:
        raise DomainError("E Y must be positive")
    scale = EY / math.sqrt(6 * d ** 3)
    return (samples - EY) / scale


@dataclass(frozen=True)
class SampleSummary:
    count: int
    mean: float
    variance: float
    skewness: float
    excess_kurtosis: float

    def to_dict(self) -> dict:
        return asdict(self)


def empirical_moments(samples: Sequence[float]) -> SampleSummary:
    x = np.asarray(samples, dtype=np.float64)
    if x.size < 2:
        raise DegenerateInput("need at least two samples")
    mean = float(x.mean())
    var = float(x.var(ddof=1))
    c = x - mean
    m2 = float(np.mean(c ** 2))
    if m2 == 0:
        skew = kurt = 0.0
    else:
        skew = float(np.mean(c ** 3) / m2 ** 1.5)
        kurt = float(np.mean(c ** 4) / m2 ** 2 - 3)
    return SampleSummary(int(x.size), mean, var, skew, kurt)


def ks_distance_normal(z: Sequence[float]) -> float:
    """Sup distance between the empirical CDF of ``z`` and the standard normal CDF."""
    z = np.sort(np.asarray(z, dtype=np.float64))
    m = z.size
    if m < 10:
        raise DegenerateInput("need at least 10 samples")
    cdf = ndtr(z)
    # ECDF just after / just before each point; ties handled by the extremes
    upper = np.arange(1, m + 1) / m
    lower = np.arange(0, m) / m
    return float(max(np.max(upper - cdf), np.max(cdf - lower)))


def loglog_slope(xs: Sequence[float], ys: Sequence[float]) -> tuple[float, float]:
    """Least-squares fit of ``log y`` on ``log x``; returns ``(slope, intercept)``."""
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    if xs.size != ys.size or xs.size < 3:
        raise DomainError("need at least three (x, y) points")
    if np.any(xs <= 0) or np.any(ys <= 0):
        raise DomainError("log-log fit needs positive data")
    slope, intercept = np.polyfit(np.log(xs), np.log(ys), 1)
    return float(slope), float(intercept)
