"""Truncated formal power series over exact rationals.

A series is a list ``c`` with ``c[k]`` the coefficient of ``z**k``; all
operations truncate to the length of their input.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence


def series_mul(a: Sequence[Fraction], b: Sequence[Fraction], size: int | None = None) -> list[Fraction]:
    size = min(len(a), len(b)) if size is None else size
    out = [Fraction(0)] * size
    for i, x in enumerate(a[:size]):
        if x:
            for j in range(size - i):
                out[i + j] += x * b[j]
    return out


def series_derivative(a: Sequence[Fraction]) -> list[Fraction]:
    return [k * a[k] for k in range(1, len(a))]


def series_integral(a: Sequence[Fraction], const: Fraction = Fraction(0)) -> list[Fraction]:
    return [Fraction(const)] + [Fraction(a[k]) / (k + 1) for k in range(len(a))]


def series_inverse(a: Sequence[Fraction]) -> list[Fraction]:
    if a[0] == 0:
        raise ZeroDivisionError("series with zero constant term has no inverse")
    inv = [Fraction(0)] * len(a)
    inv[0] = 1 / Fraction(a[0])
    for k in range(1, len(a)):
        s = sum((a[j] * inv[k - j] for j in range(1, k + 1)), Fraction(0))
        inv[k] = -s * inv[0]
    return inv


def series_log(a: Sequence[Fraction]) -> list[Fraction]:
    """``log(a)`` for a series with constant term 1, via ``(log a)' = a'/a``."""
    if a[0] != 1:
        raise ValueError("series_log needs constant term 1")
    quot = series_mul(series_derivative(a), series_inverse(a), len(a) - 1)
    return series_integral(quot)


def series_exp(f: Sequence[Fraction]) -> list[Fraction]:
    """``exp(f)`` for a series with zero constant term.

    Uses ``g' = f' g``, i.e. ``k g_k = sum_{j=1..k} j f_j g_{k-j}``.
    """
    if f[0] != 0:
        raise ValueError("series_exp needs zero constant term")
    g = [Fraction(0)] * len(f)
    g[0] = Fraction(1)
    for k in range(1, len(f)):
        g[k] = sum((j * f[j] * g[k - j] for j in range(1, k + 1) if f[j]), Fraction(0)) / k
    return g
