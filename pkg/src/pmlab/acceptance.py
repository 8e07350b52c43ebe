"""Acceptance criteria as runnable checks.

Each check returns a :class:`CriterionResult`; :data:`SUITES` groups them
under names accepted by ``pmlab verify <suite>``. Time budgets are part of
each check.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import mpmath as mp
import numpy as np

from .asymptotics import (dominant_k, expected_Y, laplace_params,
                          log_moment_ratio, mean_squared_residual, phi, phi_via_switchings,
                          regression_coefficients, residual_order_check, second_moment_laplace,
                          second_moment_sum)
from .counting import (count_perfect_matchings, enumerate_regular, enumerate_regular_by_complement)
from .coupling import (build_exact_config, containment_probability, exact_marginal,
                       max_uniform_deviation, run_chains, run_steps, verify_degree_bounds)
from .graph import Graph
from .pairs import disjoint_pair_count, pm_pair_counts_bruteforce, pm_pair_counts_exact
from .sampler import RngStream, sample_pm_complement, sample_regular
from .stats import (chi_square_uniform, empirical_moments, ks_distance_normal, standardize_Y)


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    seconds: float = 0.0
    detail: dict = field(default_factory=dict)

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"[{tag}] {self.number:2d} {self.name} ({self.seconds:.2f}s)"

    def to_dict(self) -> dict:
        return {"number": self.number, "name": self.name, "passed": self.passed,
                "seconds": round(self.seconds, 3), "detail": self.detail}


def _timed(number: int, name: str, budget: float):
    def wrap(fn: Callable[..., tuple[bool, dict]]):
        def run(seed: int = 0) -> CriterionResult:
            t0 = time.perf_counter()
            ok, detail = fn(seed)
            dt = time.perf_counter() - t0
            detail["budget_s"] = budget
            return CriterionResult(number, name, bool(ok and dt < budget), dt, detail)
        run.__name__ = fn.__name__
        run.number = number
        return run
    return wrap


@_timed(1, "pm counts of complete graphs", 1.0)
def pm_count_oracle(seed):
    got = {n: count_perfect_matchings(Graph.complete(n)) for n in range(2, 13, 2)}
    want = {n: math.factorial(n) // (math.factorial(n // 2) * 2 ** (n // 2)) for n in got}
    return got == want, {"counts": got}


@_timed(2, "ensemble sizes", 60.0)
def ensemble_sizes(seed):
    want = {(4, 1): 3, (6, 2): 70, (6, 3): 70, (8, 3): 19355}
    got = {f"{n},{d}": len(enumerate_regular(n, d)) for n, d in want}
    by_comp = enumerate_regular_by_complement(6, 3)
    same = sorted(by_comp.graphs, key=lambda g: g.rows) == sorted(
        enumerate_regular(6, 3).graphs, key=lambda g: g.rows)
    ok = all(got[f"{n},{d}"] == v for (n, d), v in want.items()) and same and len(by_comp) == 70
    return ok, {"sizes": got, "complement_bijection_6_3": len(by_comp), "same_set": same}


@_timed(3, "pair-count identity and disjoint-pair EGF", 60.0)
def pair_identity(seed):
    per_n = {}
    for n in (4, 6, 8, 10):
        per_n[n] = pm_pair_counts_exact(n).counts == pm_pair_counts_bruteforce(n).counts
    d4, d6 = disjoint_pair_count(4), disjoint_pair_count(6)
    return all(per_n.values()) and d4 == 6 and d6 == 120, {"match": per_n, "D4": d4, "D6": d6}


@_timed(4, "phi identities", 1.0)
def phi_identities(seed):
    ds = np.linspace(3, 500, 25)
    ends = (np.allclose(phi(ds, 1.0), 0.25, rtol=0, atol=1e-14)
            and np.allclose(phi(ds, 0.0), 1.0, rtol=0, atol=1e-14))
    rng = np.random.default_rng(seed)
    dg = rng.uniform(3, 1000, 200)
    ag = rng.uniform(0, 1, 200)
    # d^2-sized terms cancel in the switching form, so compare at 30 digits
    with mp.workdps(30):
        sw = max(float(abs(phi(mp.mpf(d), mp.mpf(a)) - phi_via_switchings(mp.mpf(d), mp.mpf(a))))
                 for d, a in zip(dg.tolist(), ag.tolist()))
    closed = 0.0
    for d in (3, 4, 5, 10, 100, 10 ** 3, 10 ** 4, 10 ** 5, 10 ** 6):
        closed = max(closed, abs(float(phi(float(d), 1.0 / d))
                                 - (4 * d * d - 10 * d + 5) / (4 * (d - 1) ** 2)))
    return ends and sw < 1e-10 and closed < 1e-12, {
        "endpoints_ok": bool(ends), "max_switching_diff": sw, "max_closed_form_diff": closed}


@_timed(5, "residual orders of truncated expansions", 1.0)
def residual_orders(seed):
    grid = [int(round(x)) for x in np.geomspace(1e2, 1e5, 12)]
    slopes = {f: residual_order_check(f, grid).slope
              for f in ("phi_expansion", "log_sqrt_expansion", "cov_bracket")}
    ok = all(s is not None and abs(s + 4) <= 0.15 for s in slopes.values())
    return ok, {"slopes": slopes}


@_timed(6, "Laplace evaluation vs direct sum", 10.0)
def laplace_vs_sum(seed):
    rows = {}
    ok = True
    for n, d in ((10 ** 5, 5), (10 ** 7, 8)):
        diff = float(second_moment_laplace(n, d) - second_moment_sum(n, d, pairs="asymptotic"))
        bound = 10 * (math.sqrt(d / n) * math.log(n) ** 6 + d ** 3 / n)
        k_star, k_bar = dominant_k(n, d), laplace_params(n, d).k_bar
        rows[f"{n},{d}"] = {"diff": diff, "bound": bound, "k_scan": k_star, "k_bar": k_bar}
        ok &= abs(diff) <= bound and abs(k_star - k_bar) <= 2
    return ok, rows


@_timed(7, "moment-ratio trend", 1.0)
def moment_ratio_trend(seed):
    def scaled(n, d):
        return float(np.expm1(float(log_moment_ratio(n, d)))) * 6 * d ** 3

    at = scaled(10 ** 9, 8)
    trend = [scaled(10 ** 10, d) for d in (6, 8, 12)]
    gaps = [abs(t - 1) for t in trend]
    ok = 0.5 <= at <= 2 and gaps[0] > gaps[1] > gaps[2]
    return ok, {"scaled_at_1e9_8": at, "scaled_trend_1e10": dict(zip((6, 8, 12), trend))}


@_timed(8, "regression residual identity", 60.0)
def regression_identity(seed):
    out = {}
    ok = True
    for n, d in ((6, 3), (8, 3)):
        ens = enumerate_regular(n, d)
        coef = regression_coefficients(ens)
        msr = mean_squared_residual(ens, coef)
        out[f"{n},{d}"] = {"residual_variance": str(coef.residual_variance), "msr": str(msr)}
        ok &= isinstance(msr, Fraction) and msr == coef.residual_variance
    return ok, out


@_timed(9, "coupling exactness", 120.0)
def coupling_exactness(seed):
    out = {}
    ok = True
    for n, d in ((4, 0), (6, 2)):
        e0, e1 = enumerate_regular(n, d), enumerate_regular(n, d + 1)
        cfg = build_exact_config(e0, e1, 0.1)
        marg = exact_marginal(cfg)
        exact_uniform = all(p == Fraction(1, len(e1)) for p in marg)
        float_dev = max_uniform_deviation(exact_marginal(cfg, exact=False))
        bounds = verify_degree_bounds(cfg).passed
        contain = containment_probability(cfg)
        contain_ok = contain >= 1 - 2 * cfg.eta
        out[f"{n},{d}->{d + 1}"] = {
            "eta": str(cfg.eta), "exact_uniform": exact_uniform, "float_dev": float_dev,
            "degree_bounds": bounds, "containment": str(contain),
            "containment_floor": str(1 - 2 * cfg.eta), "containment_ok": bool(contain_ok)}
        ok &= exact_uniform and float_dev <= 1e-12 and bounds and contain_ok
    e2, e3 = enumerate_regular(6, 2), enumerate_regular(6, 3)
    doctored = build_exact_config(e2, e3, 0.1, Z_upper=max(e2.Z) - 1, validate=False)
    neg = max_uniform_deviation(exact_marginal(doctored, strict=False))
    out["negative_control_dev"] = neg
    return ok and neg > 0, out


@_timed(10, "Monte Carlo coupling", 120.0)
def coupling_monte_carlo(seed, samples: int = 50_000):
    e1, e2, e3 = (enumerate_regular(6, d) for d in (1, 2, 3))
    cfg = build_exact_config(e2, e3, 0.1)
    run = run_steps(cfg, samples, RngStream(seed, 0))
    _, p = chi_square_uniform(run.class_counts)
    exact = float(containment_probability(cfg))
    sigma = math.sqrt(exact * (1 - exact) / samples)
    chain = run_chains([build_exact_config(e1, e2, 0.1), cfg], samples, RngStream(seed, 1))
    _, p_chain = chi_square_uniform(chain.class_counts)
    ok = p > 1e-3 and run.containment_rate >= exact - 3 * sigma and p_chain > 1e-3
    return ok, {"p_marginal": p, "containment_rate": run.containment_rate,
                "containment_exact": exact, "sigma": sigma, "branches": run.branches,
                "p_chain_marginal": p_chain, "chain_containment_rate": chain.containment_rate}


@_timed(11, "sampler exactness", 60.0)
def sampler_exactness(seed):
    ens = enumerate_regular(6, 2)
    gen = RngStream(seed, 0).generator()
    counts = [0] * len(ens)
    for _ in range(70_000):
        counts[ens.index(sample_regular(6, 2, gen))] += 1
    _, p_reg = chi_square_uniform(counts)
    c6 = Graph.cycle(6)
    gen = RngStream(seed, 1).generator()
    tally: dict = {}
    for _ in range(20_000):
        M = sample_pm_complement(c6, gen)
        tally[M] = tally.get(M, 0) + 1
    _, p_pm = chi_square_uniform(list(tally.values()))
    ok = p_reg > 1e-3 and len(tally) == 4 and p_pm > 1e-3
    return ok, {"p_regular_6_2": p_reg, "pm_classes": len(tally), "p_pm_complement_C6": p_pm}


@_timed(12, "normality diagnostic (report only)", 600.0)
def normality_report(seed, n: int = 24, d: int = 3, samples: int = 20_000):
    gen = RngStream(seed, 0).generator()
    ys = np.array([count_perfect_matchings(sample_regular(n, d, gen)) for _ in range(samples)],
                  dtype=np.float64)
    z = standardize_Y(ys, n, d)
    summ = empirical_moments(z)
    ks = ks_distance_normal(z)
    raw = empirical_moments(ys)
    rel_var = raw.variance / raw.mean ** 2
    report = {"n": n, "d": d, "samples": samples, "standardized": summ.to_dict(),
              "ks_distance": ks, "var_over_mean_sq": rel_var,
              "one_over_6d3": 1 / (6 * d ** 3),
              "EY_formula": math.exp(float(expected_Y(n, d))), "mean_Y": raw.mean}
    finite = all(math.isfinite(v) for v in (*summ.to_dict().values(), ks, rel_var))
    return finite, report


CRITERIA = (pm_count_oracle, ensemble_sizes, pair_identity, phi_identities, residual_orders,
            laplace_vs_sum, moment_ratio_trend, regression_identity, coupling_exactness,
            coupling_monte_carlo, sampler_exactness, normality_report)

SUITES: dict[str, tuple] = {
    "counting": (pm_count_oracle, ensemble_sizes),
    "egf": (pm_count_oracle, pair_identity),
    "asymptotics": (phi_identities, residual_orders, laplace_vs_sum, moment_ratio_trend,
                    regression_identity),
    "coupling": (coupling_exactness, coupling_monte_carlo),
    "sampler": (sampler_exactness,),
    "normality": (normality_report,),
    "fast": CRITERIA[:11],
    "all": CRITERIA,
}
for _c in CRITERIA:
    SUITES[str(_c.number)] = (_c,)


def run_suite(name: str, seed: int = 0) -> list[CriterionResult]:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    return [check(seed) for check in SUITES[name]]
