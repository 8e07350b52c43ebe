"""Closed-form and asymptotic moment formulas for perfect matchings in G(n, d).

Quantities that overflow or underflow floats (``rho``, ``E Y``, ``E Y^2``)
are returned as natural logarithms in ``mpmath.mpf`` form, computed at
``config.MP_DPS`` digits. mpf values keep their precision, but arithmetic on
them after the call happens at the caller's mpmath precision; wrap
differences of large logs in ``mp.workdps(...)`` (or use
:func:`log_moment_ratio`).
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Sequence

import mpmath as mp
import numpy as np
from scipy.special import gammaln

from .config import DEFAULT_LIMITS, MP_DPS, Limits
from .counting import Ensemble
from .errors import DegenerateInput, DomainError, ZeroVariance
from .graph import Graph
from .pairs import pm_pair_counts_exact

# Logarithm used in the Laplace error term xi.
XI_LOG = math.log


def _mpf(x):
    if isinstance(x, Fraction):
        return mp.mpf(x.numerator) / x.denominator
    return mp.mpf(x)


# -- phi ---------------------------------------------------------------------


def phi(d, alpha):
    """Exponential correction ``phi(d, alpha)`` of the union-of-matchings probability.

    Works with ints, floats, Fractions or mpf; exact inputs give exact output.
    """
    den = 4 * (d - 2 + alpha) ** 2
    if np.any(den == 0):
        raise DomainError("d - 2 + alpha must be nonzero")
    num = 4 * (d - 2) ** 2 - (d * d - 5) * alpha ** 2 - (2 * d * d - 14 * d + 20) * alpha
    return num / den


def phi_via_switchings(d, alpha):
    """``phi`` assembled from McKay's lambda/mu terms with ``n`` scaled out.

    ``g = d - d^H`` has ``alpha*n`` entries equal to ``d-1`` and the rest
    ``d-2``; ``H`` is ``alpha*n/2`` isolated edges plus cycles.
    """
    if np.any(d - 2 + alpha == 0):
        raise DomainError("d - 2 + alpha must be nonzero")
    two_m = d - 2 + alpha  # 2 m(g) / n
    lam_g = ((d - 1) * (d - 2) * alpha + (d - 2) * (d - 3) * (1 - alpha)) / (2 * two_m)
    mu_g = ((d - 1) ** 2 * alpha / 2 + (d - 2) ** 2 * (1 - alpha)) / two_m
    lam_d = (d - 1) / 2 if not isinstance(d, int) else Fraction(d - 1, 2)
    return -lam_g - lam_g ** 2 - mu_g + lam_d + lam_d ** 2


# -- McKay's enumeration formula ----------------------------------------------


@dataclass(frozen=True)
class SwitchingQuantities:
    m: Fraction
    lam: Fraction
    mu: Fraction
    delta_hat: int


def switching_quantities(g: Sequence[int], X: Graph | None = None) -> SwitchingQuantities:
    """Exact ``m(g)``, ``lambda(g)``, ``mu(g, X)`` and ``Delta_hat``.

    ``lambda`` sums ``(g_i)_2`` over all components.
    """
    total = sum(g)
    if total % 2:
        raise DomainError("degree sum must be even")
    if total == 0:
        raise DomainError("zero edges: lambda and mu are undefined")
    m = Fraction(total, 2)
    lam = Fraction(sum(x * (x - 1) for x in g), 4) / m
    mu = Fraction(0)
    dx = 0
    if X is not None:
        if X.n != len(g):
            raise ValueError("X must have len(g) vertices")
        mu = Fraction(sum(g[i] * g[j] for i, j in X.edges()), 2) / m
        dx = max(X.degrees(), default=0)
    dg = max(g)
    return SwitchingQuantities(m, lam, mu, dg * dg + dg * dx)


def mckay_main_term(g: Sequence[int], X: Graph | None = None):
    """Log of ``(2m)!/(m! 2^m prod g_i!) * exp(-lambda - lambda^2 - mu)``."""
    q = switching_quantities(g, X)
    m = int(q.m)
    with mp.workdps(MP_DPS):
        val = (mp.loggamma(2 * m + 1) - mp.loggamma(m + 1) - m * mp.log(2)
               - sum(mp.loggamma(x + 1) for x in g))
        return val - _mpf(q.lam) - _mpf(q.lam) ** 2 - _mpf(q.mu)


# -- rho, E Y and subgraph probabilities --------------------------------------


def _check_nd(n, d):
    if n <= 0 or n % 2:
        raise DomainError("n must be a positive even integer")
    if d < 3 or d >= n:
        raise DomainError("need 3 <= d < n")


def rho(n, d, alpha):
    """Log of ``rho_2(n, d, alpha)`` (closed form, including ``exp(phi)``).

    At ``alpha = 1`` this is ``log rho_1(n, d)``.
    """
    _check_nd(n, d)
    if not 0 <= alpha <= 1:
        raise DomainError("alpha must lie in [0, 1]")
    with mp.workdps(MP_DPS):
        n, d, a = mp.mpf(n), mp.mpf(d), _mpf(alpha)
        s = d - 2 + a
        val = ((1 - a / 2) * n * (1 - mp.log(n)) + s / 2 * n * mp.log(s / d)
               + a / 2 * n * mp.log(d))
        if a != 1:
            val += (1 - a) * n * mp.log(d - 1)
        return val + phi(d, a)


def log_rho1(n, d):
    """Log of ``rho_1(n,d) = (e/n)^(n/2) ((d-1)/d)^((d-1)n/2) d^(n/2) e^(1/4)``."""
    _check_nd(n, d)
    with mp.workdps(MP_DPS):
        n, d = mp.mpf(n), mp.mpf(d)
        return (n / 2 * (1 - mp.log(n)) + (d - 1) / 2 * n * mp.log((d - 1) / d)
                + n / 2 * mp.log(d) + mp.mpf(1) / 4)


def log_pm_count(n):
    """Log of the number of perfect matchings of K_n."""
    with mp.workdps(MP_DPS):
        n = mp.mpf(n)
        return mp.loggamma(n + 1) - mp.loggamma(n / 2 + 1) - n / 2 * mp.log(2)


def expected_Y(n, d):
    """Log of ``E Y = n!/((n/2)! 2^(n/2)) * rho_1(n, d)``."""
    _check_nd(n, d)
    with mp.workdps(MP_DPS):
        return log_pm_count(n) + log_rho1(n, d)


def union_pm_probability(n, d, k, form: str = "factorial"):
    """Log-probability that a fixed ``k`` isolated edges + spanning cycles lie in G(n,d).

    ``form="factorial"`` evaluates the factorial expression with log-gamma;
    ``form="closed"`` is its Stirling-reduced form, i.e. :func:`rho` at
    ``alpha = 2k/n``.
    """
    _check_nd(n, d)
    if not 0 <= k <= n // 2:
        raise DomainError("need 0 <= k <= n/2")
    alpha = Fraction(2 * k, n) if isinstance(n, int) and isinstance(k, int) else 2 * k / n
    if form == "closed":
        return rho(n, d, alpha)
    if form != "factorial":
        raise ValueError(f"unknown form {form!r}")
    with mp.workdps(MP_DPS):
        n_, d_, k_ = mp.mpf(n), mp.mpf(d), mp.mpf(k)
        top = (d_ - 2) * n_ + 2 * k_
        val = (mp.loggamma(top + 1) + mp.loggamma(d_ * n_ / 2 + 1) + (n_ - k_) * mp.log(2)
               + n_ * mp.log(d_) - mp.loggamma(top / 2 + 1) - mp.loggamma(d_ * n_ + 1))
        if n - 2 * k:
            val += (n_ - 2 * k_) * mp.log(d_ - 1)
        return val + phi(d_, _mpf(alpha))


def conditional_edge_prob(n: int, d: int, H: Graph, u: int, v: int) -> Fraction:
    """Main term ``(d - d_u^H)(d - d_v^H) / (dn - 2|H|)`` of P(uv in G | H in G)."""
    if u == v:
        raise DomainError("u and v must differ")
    if H.n != n:
        raise DomainError("H must live on n vertices")
    degs = H.degrees()
    if max(degs, default=0) > d:
        raise DomainError("H has a vertex of degree > d")
    den = d * n - 2 * H.num_edges
    if den <= 0:
        raise DomainError("H uses every edge slot")
    return Fraction((d - degs[u]) * (d - degs[v]), den)


# -- second moment -------------------------------------------------------------


@dataclass(frozen=True)
class LaplaceParams:
    alpha_bar: float
    k_bar: int
    delta_bar: float
    xi: float


def laplace_params(n: int, d: int) -> LaplaceParams:
    _check_nd(n, d)
    alpha_bar = 1 / d
    return LaplaceParams(
        alpha_bar=alpha_bar,
        k_bar=n // (2 * d),
        delta_bar=(2 * d / n) * d * (d - 2) / (d - 1) ** 2,
        xi=d ** -4 + d ** 3 / n + math.sqrt(d / n) * XI_LOG(n) ** 6,
    )


def second_moment_log_terms(n: int, d: int) -> np.ndarray:
    """Float64 logs of the summands ``k = 0..n/2-1`` up to a common constant.

    Summand ``k`` is the asymptotic pair count times ``rho_2(n, d, 2k/n)``.
    The dropped constant is :func:`_second_moment_offset`; only differences
    between entries are meaningful.
    """
    _check_nd(n, d)
    k = np.arange(n // 2, dtype=np.float64)
    top = (d - 2) * n + 2 * k  # (d-2+alpha) n
    alpha = 2 * k / n
    with np.errstate(divide="ignore"):
        # rho_2 minus n(1 - ln n) + n ln(d-1)
        lr = (-k * (1 - math.log(n)) + top / 2 * np.log(top / (d * n))
              + k * math.log(d) - 2 * k * math.log(d - 1)
              + phi(float(d), alpha))
    # pair count minus ln n!
    lp = -k * math.log(2) - gammaln(k + 1) - 0.5 * np.log(math.e * math.pi * (n - 2 * k) / 2)
    return lr + lp


def _second_moment_offset(n: int, d: int):
    with mp.workdps(MP_DPS):
        n_, d_ = mp.mpf(n), mp.mpf(d)
        return mp.loggamma(n_ + 1) + n_ * (1 - mp.log(n_)) + n_ * mp.log(d_ - 1)


def dominant_k(n: int, d: int) -> int:
    """Index of the largest summand of the asymptotic second-moment sum."""
    return int(np.argmax(second_moment_log_terms(n, d)))


def second_moment_sum(n: int, d: int, pairs: str = "auto", limits: Limits = DEFAULT_LIMITS):
    """Log of ``E Y^2`` as a direct sum over the overlap ``k`` plus ``E Y``.

    ``pairs="exact"`` uses exact pair counts (``n <= limits.exact_pairs_n``),
    ``"asymptotic"`` the asymptotic pair count, ``"auto"`` picks exact when
    allowed.
    """
    _check_nd(n, d)
    if pairs == "auto":
        pairs = "exact" if n <= limits.exact_pairs_n else "asymptotic"
    if pairs == "exact":
        if n > limits.exact_pairs_n:
            raise DomainError(f"exact pair counts need n <= {limits.exact_pairs_n}")
        table = pm_pair_counts_exact(n)
        with mp.workdps(MP_DPS):
            logs = [mp.log(m) + rho(n, d, Fraction(2 * k, n))
                    for k, m in enumerate(table.counts) if m]
            return mp.log(mp.fsum(mp.exp(x - logs[-1]) for x in logs)) + logs[-1]
    if pairs != "asymptotic":
        raise ValueError(f"unknown pairs mode {pairs!r}")
    terms = second_moment_log_terms(n, d)
    top = float(terms.max())
    rel = float(np.sum(np.exp(terms - top)))
    with mp.workdps(MP_DPS):
        log_sum = _second_moment_offset(n, d) + top + mp.log(rel)
        ey = expected_Y(n, d)
        hi = max(log_sum, ey)
        return hi + mp.log(mp.exp(log_sum - hi) + mp.exp(ey - hi))


def second_moment_laplace(n: int, d: int):
    """Log of ``2/sqrt(e*delta) * n! rho_2(n,d,1/d) / (kappa! 2^kappa sqrt(n - 2 kappa))``.

    ``kappa = n/(2d)`` is used as a real number (log-gamma), which equals the
    integer ``k_bar`` whenever ``2d`` divides ``n``.
    """
    _check_nd(n, d)
    p = laplace_params(n, d)
    if p.k_bar < 1:
        raise DomainError("k_bar = floor(n/(2d)) must be at least 1")
    with mp.workdps(MP_DPS):
        n_, d_ = mp.mpf(n), mp.mpf(d)
        kappa = n_ / (2 * d_)
        delta = 2 * d_ / n_ * d_ * (d_ - 2) / (d_ - 1) ** 2
        return (mp.log(2) - mp.log(mp.e * delta) / 2 + mp.loggamma(n_ + 1)
                + rho(n, d, 1 / d_) - mp.loggamma(kappa + 1) - kappa * mp.log(2)
                - mp.log(n_ - 2 * kappa) / 2)


def log_moment_ratio(n: int, d: int):
    """``log(E Y^2 / (E Y)^2)`` from the Laplace form, at full working precision."""
    with mp.workdps(MP_DPS):
        return second_moment_laplace(n, d) - 2 * expected_Y(n, d)


# -- triangles and covariance ----------------------------------------------------


def expected_X(n, d):
    """Main term ``(d-1)^3 / 6`` of the expected triangle count."""
    if d < 2:
        raise DomainError("need d >= 2")
    if isinstance(d, int):
        return Fraction((d - 1) ** 3, 6)
    return (d - 1) ** 3 / 6


@dataclass(frozen=True)
class CovarianceTerms:
    bracket_ratio_minus_one: object  # Cov(X,Y) / (E X E Y) before expansion
    leading: object                  # -1/d^3


def cov_XY(n, d) -> CovarianceTerms:
    """Relative covariance ``Cov(X,Y)/(E X E Y)``: pre-expansion value and leading term."""
    if d < 3:
        raise DomainError("need d >= 3")
    d = Fraction(d) if isinstance(d, int) else d
    x = 1 / d
    bracket = d ** 2 / 2 * (1 - x) * (1 - 2 * x) + d ** 3 / 6 * (1 - 2 * x) ** 3
    ex_main = d ** 3 * (1 - x) ** 3 / 6
    return CovarianceTerms(bracket / ex_main - 1, -1 / d ** 3)


# -- moments, reports and regression ---------------------------------------------


@dataclass(frozen=True)
class ExactMoments:
    EY: Fraction
    EY2: Fraction
    EX: Fraction
    EX2: Fraction
    EXY: Fraction

    @property
    def VarY(self) -> Fraction:
        return self.EY2 - self.EY ** 2

    @property
    def VarX(self) -> Fraction:
        return self.EX2 - self.EX ** 2

    @property
    def CovXY(self) -> Fraction:
        return self.EXY - self.EX * self.EY


def ensemble_moments(ens: Ensemble) -> ExactMoments:
    N = len(ens)
    if N == 0:
        raise DegenerateInput("empty ensemble")
    return ExactMoments(
        EY=Fraction(sum(ens.Y), N),
        EY2=Fraction(sum(y * y for y in ens.Y), N),
        EX=Fraction(sum(ens.X), N),
        EX2=Fraction(sum(x * x for x in ens.X), N),
        EXY=Fraction(sum(x * y for x, y in zip(ens.X, ens.Y)), N),
    )


@dataclass
class MomentReport:
    """Moment summary; ``*_log`` fields are natural logs.

    ``cov_rel`` is ``Cov(X,Y)/(E X E Y)`` and ``ratio_EY2`` is
    ``E Y^2/(E Y)^2``. ``source`` is ``"formula"`` or ``"ensemble"``.
    """

    n: int
    d: int
    source: str
    EY_log: float
    EY2_log: float
    ratio_EY2: float
    cov_rel: float
    EX: float
    VarX: float
    VarY_rel: float
    alpha_bar: float | None = None
    k_bar: int | None = None
    delta_bar: float | None = None
    xi: float | None = None
    err_d2_over_n: float | None = None
    err_d3_over_n: float | None = None

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)


def moment_report(n: int, d: int) -> MomentReport:
    """Formula-mode report: ``E Y``, Laplace ``E Y^2``, covariance and triangle terms."""
    _check_nd(n, d)
    p = laplace_params(n, d)
    with mp.workdps(MP_DPS):
        ey = expected_Y(n, d)
        ey2 = second_moment_laplace(n, d) if p.k_bar >= 1 else second_moment_sum(n, d)
        ratio = float(mp.exp(ey2 - 2 * ey))
    ex = float(expected_X(n, d))
    return MomentReport(
        n=n, d=d, source="formula",
        EY_log=float(ey), EY2_log=float(ey2), ratio_EY2=ratio,
        cov_rel=float(cov_XY(n, d).leading), EX=ex, VarX=ex,
        VarY_rel=ratio - 1,
        alpha_bar=p.alpha_bar, k_bar=p.k_bar, delta_bar=p.delta_bar, xi=p.xi,
        err_d2_over_n=d * d / n, err_d3_over_n=d ** 3 / n,
    )


def ensemble_report(ens: Ensemble) -> MomentReport:
    """Exact moments of an enumerated ensemble, in :class:`MomentReport` form."""
    mom = ensemble_moments(ens)
    if mom.EY == 0:
        raise DegenerateInput("E Y = 0 on this ensemble")
    cov_rel = mom.CovXY / (mom.EX * mom.EY) if mom.EX else float("nan")
    return MomentReport(
        n=ens.n, d=ens.d, source="ensemble",
        EY_log=math.log(mom.EY), EY2_log=math.log(mom.EY2),
        ratio_EY2=float(mom.EY2 / mom.EY ** 2), cov_rel=float(cov_rel),
        EX=float(mom.EX), VarX=float(mom.VarX), VarY_rel=float(mom.VarY / mom.EY ** 2),
    )


@dataclass(frozen=True)
class RegressionCoefficients:
    """Least-squares line ``Y ~ a X + b``.

    From a formula report, ``a``, ``b`` are in units of ``E Y`` and
    ``residual_variance`` in units of ``(E Y)^2``.
    """

    a: object
    b: object
    residual_variance: object


def regression_coefficients(source) -> RegressionCoefficients:
    """``a = Cov/VarX``, ``b = EY - a EX``, residual ``VarY - Cov^2/VarX``."""
    if isinstance(source, Ensemble):
        source = ensemble_moments(source)
    if isinstance(source, ExactMoments):
        var_x, cov = source.VarX, source.CovXY
        if var_x == 0:
            raise ZeroVariance("Var X = 0")
        a = cov / var_x
        return RegressionCoefficients(a, source.EY - a * source.EX,
                                      source.VarY - cov * cov / var_x)
    if isinstance(source, MomentReport):
        if source.VarX == 0:
            raise ZeroVariance("Var X = 0")
        cov = source.cov_rel * source.EX  # Cov / E Y
        a = cov / source.VarX
        return RegressionCoefficients(a, 1 - a * source.EX,
                                      source.VarY_rel - cov * cov / source.VarX)
    raise TypeError(f"cannot regress on {type(source).__name__}")


def mean_squared_residual(ens: Ensemble, coef: RegressionCoefficients) -> Fraction:
    """Direct average of ``(Y - aX - b)^2`` over the ensemble."""
    return sum(((y - coef.a * x - coef.b) ** 2 for x, y in zip(ens.X, ens.Y)),
               Fraction(0)) / len(ens)


# -- residual orders of truncated expansions ----------------------------------------


def _residual(family: str, d: int):
    D = Fraction(d)
    if family == "phi_closed_form":
        return phi(D, 1 / D) - (4 * D * D - 10 * D + 5) / (4 * (D - 1) ** 2)
    if family == "phi_expansion":
        return phi(D, 1 / D) - (1 - 1 / (2 * D) - Fraction(3, 4) / D ** 2 - 1 / D ** 3)
    if family == "cov_bracket":
        return cov_XY(None, D).bracket_ratio_minus_one + 1 / D ** 3
    if family == "log_sqrt_expansion":
        with mp.workdps(60):
            dm = mp.mpf(d)
            return (mp.log((dm - 1) / (dm - 2)) / 2
                    - (1 / (2 * dm) + mp.mpf(3) / (4 * dm ** 2) + mp.mpf(7) / (6 * dm ** 3)))
    raise ValueError(f"unknown family {family!r}")


RESIDUAL_FAMILIES = ("phi_closed_form", "phi_expansion", "log_sqrt_expansion", "cov_bracket")


@dataclass(frozen=True)
class SlopeReport:
    family: str
    d_grid: tuple[int, ...]
    residuals: tuple[float, ...]
    max_abs: float
    slope: float | None
    intercept: float | None


def residual_order_check(family: str, d_grid: Sequence[int]) -> SlopeReport:
    """Residuals of a named identity/expansion over ``d_grid`` and their log-log slope.

    Rational families are evaluated exactly; the log family at 60 digits. The
    slope is ``None`` when every residual is exactly zero (identities).
    """
    from .stats import loglog_slope

    if any(d < 100 or d > 10 ** 6 for d in d_grid):
        raise DomainError("d_grid must lie in [1e2, 1e6]")
    res = [_residual(family, d) for d in d_grid]
    mags = [abs(float(r)) for r in res]
    slope = intercept = None
    if all(m > 0 for m in mags):
        slope, intercept = loglog_slope(list(map(float, d_grid)), mags)
    return SlopeReport(family, tuple(d_grid), tuple(float(r) for r in res),
                       max(mags), slope, intercept)
