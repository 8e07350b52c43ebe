"""Coupling of G(n, d) with G(n, d+1) by adding a random perfect matching.

One step: draw ``G`` uniform in G(n, d), add a uniform perfect matching of
its complement to get ``G'``, and draw an independent uniform ``H`` in
G(n, d+1). Then

* ``G'`` in the bad set ``B``: keep ``G'`` with probability
  ``(1 - eta) Z(G)/Z_upper``, otherwise output ``H``;
* ``G'`` not in ``B``: keep ``G'`` with probability
  ``(1 - eta) Z(G)/Z_upper * Y_lower/Y(G')``, output a bad graph ``G''`` with
  probability ``(1 - eta) Z(G)/Z_upper * (Y_lower - Y(G''))/D_hat`` each,
  otherwise output ``H``.

Whenever every branch mass is a probability, the output is exactly uniform
on G(n, d+1). At enumerable sizes the thresholds come from the ensembles
themselves (exact mode); :func:`build_asymptotic_config` only evaluates the
asymptotic thresholds and is not runnable.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import IO, Sequence

import mpmath as mp
import numpy as np

from .config import MP_DPS
from .counting import Ensemble, perfect_matchings
from .errors import (CapExceeded, DomainError, EmptyEnsemble, EtaOutOfRange, InfeasibleRegime,
                     ProbabilityOverflow)
from .graph import Graph, Matching, complement, encode_graph6, union_with_matching
from .sampler import _as_generator, sample_from_ensemble, sample_pm_complement

ACCEPT = "accept-G'"
DEMOTE = "demote-to-B-member"
FALLBACK = "fallback-H"


def _frac_str(x) -> str | float | None:
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    if x is None:
        return None
    return float(x)


@dataclass(frozen=True)
class CouplingConfig:
    """Thresholds and bad sets of one coupling step.

    In exact mode ``Z_upper``, ``Y_lower``, ``eta``, ``D`` and ``D_hat`` are
    exact rationals and ``bad`` lists indices into ``ens_d1``. In asymptotic
    mode the large quantities are natural logs (fields ending in ``_log``)
    and the bad sets are implicit threshold predicates.
    """

    n: int
    d: int
    mode: str
    eta: object
    Z_upper: object = None
    Y_lower: object = None
    D: object = None
    D_hat: object = None
    bad: tuple[int, ...] = ()
    bad_prime: tuple[int, ...] = ()
    q: float | None = None
    alpha: float | None = None
    C: float | None = None
    C_prime: float | None = None
    Z_star_log: object = None
    Y_star_log: object = None
    Y_lower_log: object = None
    Z_upper_log: object = None
    D_hat_log: object = None
    Y_ratio_log: float | None = None  # log(Y_lower / Y_star)
    Z_ratio_log: float | None = None  # log(Z_upper / Z_star)
    ens_d: Ensemble | None = field(default=None, repr=False, compare=False)
    ens_d1: Ensemble | None = field(default=None, repr=False, compare=False)

    @property
    def bad_weights(self) -> list:
        """``Y_lower - Y(G'')`` for each bad graph, in ``bad`` order."""
        return [self.Y_lower - self.ens_d1.Y[j] for j in self.bad]

    def to_dict(self) -> dict:
        out = {
            "n": self.n, "d": self.d, "mode": self.mode,
            "eta": _frac_str(self.eta),
            "q": self.q, "alpha": self.alpha, "C": self.C, "C_prime": self.C_prime,
        }
        if self.mode == "exact":
            out.update({
                "Z_upper": _frac_str(self.Z_upper), "Y_lower": _frac_str(self.Y_lower),
                "D": _frac_str(self.D), "D_hat": _frac_str(self.D_hat),
                "bad": [{"graph6": encode_graph6(self.ens_d1.graphs[j]).decode(),
                         "weight": _frac_str(w)}
                        for j, w in zip(self.bad, self.bad_weights)],
                "bad_prime": [encode_graph6(self.ens_d1.graphs[j]).decode()
                              for j in self.bad_prime],
            })
        else:
            out.update({k: _frac_str(getattr(self, k)) for k in (
                "Z_star_log", "Y_star_log", "Y_lower_log", "Z_upper_log", "D_hat_log",
                "Y_ratio_log", "Z_ratio_log")})
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _inverse_cdf_quantile(values: Sequence[int], q: float) -> int:
    xs = sorted(values)
    idx = max(0, math.ceil(q * len(xs)) - 1)
    return xs[min(idx, len(xs) - 1)]


def check_well_defined(cfg: CouplingConfig) -> None:
    """Raise unless every branch of every step is a probability.

    Checks ``0 <= eta < 1``, ``Z(G) <= Z_upper``, ``Y_lower <= Y(G')`` off
    the bad set and ``sum_B (Y_lower - Y)/D_hat <= eta``.
    """
    if not 0 <= cfg.eta < 1:
        raise EtaOutOfRange(f"eta={cfg.eta} outside [0, 1)")
    if max(cfg.ens_d.Z) > cfg.Z_upper:
        raise ProbabilityOverflow("Z(G) exceeds Z_upper")
    bad = set(cfg.bad)
    if any(y < cfg.Y_lower for j, y in enumerate(cfg.ens_d1.Y) if j not in bad):
        raise ProbabilityOverflow("a graph outside B has Y below Y_lower")
    if cfg.bad and sum(cfg.bad_weights) > cfg.eta * cfg.D_hat:
        raise EtaOutOfRange("bad-set mass exceeds eta * D_hat")


def build_exact_config(ens_d: Ensemble, ens_d1: Ensemble, q: float = 0.1, *,
                       eta=None, Z_upper=None, Y_lower=None,
                       validate: bool = True) -> CouplingConfig:
    """Exact-mode configuration from the two enumerated ensembles.

    ``Z_upper = max Z``; ``Y_lower`` is the inverse-CDF ``q``-quantile of
    the positive values of ``Y`` over G(n, d+1) (graphs with ``Y = 0`` are
    unreachable by ``G'`` and land in ``B``); ``B = {Y < Y_lower}``;
    ``eta = sum_B (Y_lower - Y) / D_hat``.

    Keyword overrides replace the derived values (slack, or deliberately
    broken configs with ``validate=False``).
    """
    if len(ens_d) == 0 or len(ens_d1) == 0:
        raise EmptyEnsemble("both ensembles must be non-empty")
    if ens_d.n != ens_d1.n or ens_d1.d != ens_d.d + 1:
        raise DomainError("ensembles must be G(n, d) and G(n, d+1)")
    if not 0 < q <= 1:
        raise DomainError("q must lie in (0, 1]")
    positive = [y for y in ens_d1.Y if y > 0]
    if not positive:
        raise EmptyEnsemble("no (d+1)-regular graph has a perfect matching")
    y_low = Fraction(_inverse_cdf_quantile(positive, q) if Y_lower is None else Y_lower)
    z_up = Fraction(max(ens_d.Z) if Z_upper is None else Z_upper)
    bad = tuple(j for j, y in enumerate(ens_d1.Y) if y < y_low)
    bad_set = set(bad)
    D = sum(ens_d1.Y)
    D_hat = sum(y for j, y in enumerate(ens_d1.Y) if j not in bad_set)
    if D_hat == 0:
        raise EtaOutOfRange("D_hat = 0: every reachable graph is bad")
    eta_min = sum((y_low - ens_d1.Y[j] for j in bad), Fraction(0)) / D_hat
    cfg = CouplingConfig(
        n=ens_d.n, d=ens_d.d, mode="exact",
        eta=eta_min if eta is None else Fraction(eta),
        Z_upper=z_up, Y_lower=y_low, D=Fraction(D), D_hat=Fraction(D_hat),
        bad=bad, bad_prime=(), q=q, ens_d=ens_d, ens_d1=ens_d1,
    )
    if validate:
        check_well_defined(cfg)
    return cfg


def log_regular_count(n, d):
    """Log of McKay's main term for the number of labeled ``d``-regular graphs."""
    with mp.workdps(MP_DPS):
        n_, d_ = mp.mpf(n), mp.mpf(d)
        m = n_ * d_ / 2
        lam = (d_ - 1) / 2
        return (mp.loggamma(2 * m + 1) - mp.loggamma(m + 1) - m * mp.log(2)
                - n_ * mp.loggamma(d_ + 1) - lam - lam ** 2)


def asymptotic_eta(n, d, alpha, C_prime=1.0) -> float:
    """``2a + 1/(d^3 a^2) + C' d^3/(n a^2) + C' sqrt(d/n) ln^6 n / a^2``."""
    a2 = alpha * alpha
    return (2 * alpha + 1 / (d ** 3 * a2) + C_prime * d ** 3 / (n * a2)
            + C_prime * math.sqrt(d / n) * math.log(n) ** 6 / a2)


def build_asymptotic_config(n, d, alpha, C=1.0, C_prime=1.0, strict: bool = True) -> CouplingConfig:
    """Evaluate the asymptotic thresholds in log scale.

    Raises :class:`EtaOutOfRange` when ``eta >= 1`` unless ``strict=False``,
    in which case the (infeasible) config is still returned for reporting.
    """
    from .asymptotics import expected_Y, log_pm_count

    if d < 3:
        raise DomainError("need d >= 3")
    if not 0 < alpha < 1:
        raise DomainError("alpha must lie in (0, 1)")
    if n % 2:
        raise DomainError("n must be even")
    eta = asymptotic_eta(n, d, alpha, C_prime)
    if strict and eta >= 1:
        raise EtaOutOfRange(f"eta={eta:.6g} >= 1: no coupling in this regime")
    with mp.workdps(MP_DPS):
        z_star = log_pm_count(n) - mp.mpf(d) / 2
        y_star = expected_Y(n, d)
        y_factor = 1 - alpha - C * d ** 3 / n
        y_ratio = mp.log(y_factor) if y_factor > 0 else None
        z_ratio = mp.log1p(mp.mpf(C) * d * d / n)
        d_hat = log_regular_count(n, d + 1) + expected_Y(n, d + 1)
        return CouplingConfig(
            n=n, d=d, mode="asymptotic", eta=eta, alpha=alpha, C=C, C_prime=C_prime,
            Z_star_log=z_star, Y_star_log=y_star,
            Y_lower_log=None if y_ratio is None else y_star + y_ratio,
            Z_upper_log=z_star + z_ratio, D_hat_log=d_hat,
            Y_ratio_log=None if y_ratio is None else float(y_ratio), Z_ratio_log=float(z_ratio),
        )


# -- one step --------------------------------------------------------------------


@dataclass(frozen=True)
class CouplingOutcome:
    G_d: Graph
    G_prime: Graph
    G_next: Graph
    branch: str
    contained: bool


def _branch_masses(cfg: CouplingConfig, z, y_prime, prime_bad: bool, strict: bool, one=1):
    """``(accept, demote_total, fallback)`` for one ``(G, G')`` pair."""
    base = (one - cfg.eta) * z / cfg.Z_upper
    if prime_bad:
        acc, dem = base, 0 * base
    else:
        acc = base * cfg.Y_lower / y_prime
        dem = base * sum(cfg.bad_weights, 0 * base) / cfg.D_hat if cfg.bad else 0 * base
    if min(acc, dem) < 0 or acc + dem > one:
        if strict:
            raise ProbabilityOverflow(
                f"branch masses {float(acc):.6g} + {float(dem):.6g} exceed one")
        acc = min(max(acc, 0 * acc), one)
        dem = min(max(dem, 0 * dem), one - acc)
    return acc, dem, one - acc - dem


def couple_step(cfg: CouplingConfig, rng, G_d: Graph | None = None, *,
                pm_method: str = "counting", strict: bool = True) -> CouplingOutcome:
    """Run one coupling step; ``G_d`` defaults to a uniform draw from ``ens_d``.

    With ``strict=False`` branch masses above one are clipped (accept first,
    then demotion) instead of raising; the marginal is then generally not
    uniform.
    """
    if cfg.mode != "exact":
        if cfg.eta >= 1:
            raise InfeasibleRegime(f"eta={cfg.eta:.6g} >= 1: the coupling is undefined")
        raise CapExceeded(f"n={cfg.n}: asymptotic configs cannot be sampled, evaluate only")
    gen = _as_generator(rng)
    ens_d, ens_d1 = cfg.ens_d, cfg.ens_d1
    if G_d is None:
        G_d = sample_from_ensemble(ens_d, gen)
    z = ens_d.Z[ens_d.index(G_d)]
    M = sample_pm_complement(G_d, gen, method=pm_method)
    G_prime = union_with_matching(G_d, M)
    H = sample_from_ensemble(ens_d1, gen)
    j = ens_d1.index(G_prime)
    acc, dem, _ = _branch_masses(cfg, z, ens_d1.Y[j], j in set(cfg.bad), strict)
    u = gen.random()
    if u < acc:
        G_next, branch = G_prime, ACCEPT
    elif u < acc + dem:
        w = np.array([float(x) for x in cfg.bad_weights])
        pick = cfg.bad[int(gen.choice(len(w), p=w / w.sum()))]
        G_next, branch = ens_d1.graphs[pick], DEMOTE
    else:
        G_next, branch = H, FALLBACK
    return CouplingOutcome(G_d, G_prime, G_next, branch, G_d.issubgraph(G_next))


def write_outcomes_csv(outcomes, fh: IO[str]) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["branch", "contained", "G_d", "G_next"])
    for o in outcomes:
        w.writerow([o.branch, int(o.contained), encode_graph6(o.G_d).decode(),
                    encode_graph6(o.G_next).decode()])


# -- exact evaluation ----------------------------------------------------------------


@dataclass
class KernelRow:
    """Law of ``G_next`` given ``G_d``.

    ``accept[j]`` is the mass sent to ``G' = j`` by the keep branch,
    ``demote`` the total mass spread over ``B`` proportionally to the bad
    weights, ``fallback`` the mass spread uniformly over G(n, d+1).
    """

    accept: dict[int, object]
    demote: object
    fallback: object
    supersets: tuple[int, ...]


def transition_kernel(cfg: CouplingConfig, exact: bool = True, strict: bool = True) -> list[KernelRow]:
    """Exact transition rows, one per graph of ``ens_d``.

    Sums over every perfect matching of each complement; rationals when
    ``exact``, floats otherwise.
    """
    if cfg.mode != "exact":
        raise InfeasibleRegime("exact evaluation needs an exact-mode config")
    conv = (lambda x: x) if exact else float
    one = Fraction(1) if exact else 1.0
    c = replace(cfg, eta=conv(cfg.eta), Z_upper=conv(cfg.Z_upper),
                Y_lower=conv(cfg.Y_lower), D_hat=conv(cfg.D_hat))
    ens_d, ens_d1 = cfg.ens_d, cfg.ens_d1
    bad = set(cfg.bad)
    rows = []
    for i, G in enumerate(ens_d.graphs):
        z = ens_d.Z[i]
        accept: dict[int, object] = {}
        demote = fallback = 0 * one
        supers = []
        for pm in perfect_matchings(complement(G)):
            j = ens_d1.index(union_with_matching(G, Matching(pm)))
            supers.append(j)
            acc, dem, fb = _branch_masses(c, conv(z), conv(ens_d1.Y[j]), j in bad, strict, one)
            w = one / z
            accept[j] = accept.get(j, 0 * one) + w * acc
            demote += w * dem
            fallback += w * fb
        rows.append(KernelRow(accept, demote, fallback, tuple(supers)))
    return rows


def _demote_law(cfg: CouplingConfig, exact: bool) -> dict[int, object]:
    if not cfg.bad:
        return {}
    w = cfg.bad_weights
    tot = sum(w, Fraction(0))
    return {j: (x / tot if exact else float(x / tot)) for j, x in zip(cfg.bad, w)}


def exact_marginal(cfg: CouplingConfig, exact: bool = True, strict: bool = True) -> list:
    """``P(G_next = G')`` for every ``G'`` in ``ens_d1`` (index order)."""
    rows = transition_kernel(cfg, exact, strict)
    zero = Fraction(0) if exact else 0.0
    N0, N1 = len(cfg.ens_d), len(cfg.ens_d1)
    sigma = Fraction(1, N0) if exact else 1.0 / N0
    out = [zero] * N1
    demote = fallback = zero
    for r in rows:
        for j, p in r.accept.items():
            out[j] += sigma * p
        demote += sigma * r.demote
        fallback += sigma * r.fallback
    for j, p in _demote_law(cfg, exact).items():
        out[j] += demote * p
    share = fallback / N1
    return [x + share for x in out]


def max_uniform_deviation(marginal: Sequence) -> float:
    N = len(marginal)
    return max(abs(float(p - Fraction(1, N)) if isinstance(p, Fraction) else abs(p - 1 / N))
               for p in marginal)


def _contained_rows(cfg: CouplingConfig, exact: bool, strict: bool) -> list[dict[int, object]]:
    """Per ``G_d``: ``{j: P(G_next = j)}`` restricted to supersets ``j`` of ``G_d``."""
    rows = transition_kernel(cfg, exact, strict)
    law = _demote_law(cfg, exact)
    N1 = len(cfg.ens_d1)
    out = []
    for r in rows:
        t = {}
        for j in r.supersets:
            t[j] = r.accept.get(j, 0) + r.demote * law.get(j, 0) + r.fallback / N1
        out.append(t)
    return out


def containment_probability(cfg: CouplingConfig, exact: bool = True, strict: bool = True):
    """Exact ``P(G_d is a subgraph of G_next)``."""
    rows = _contained_rows(cfg, exact, strict)
    N0 = len(cfg.ens_d)
    total = sum((sum(t.values(), Fraction(0) if exact else 0.0) for t in rows),
                Fraction(0) if exact else 0.0)
    return total / N0


def chain_containment_probability(configs: Sequence[CouplingConfig], exact: bool = True):
    """Exact probability that the whole chain ``G_d <= G_{d+1} <= ...`` is nested."""
    _check_chain(configs)
    one = Fraction(1) if exact else 1.0
    tail = [one] * len(configs[-1].ens_d1)
    for cfg in reversed(configs):
        rows = _contained_rows(cfg, exact, True)
        tail = [sum((p * tail[j] for j, p in t.items()), 0 * one) for t in rows]
    return sum(tail, 0 * one) / len(tail)


@dataclass(frozen=True)
class DegreeBoundReport:
    d_minus_B: int
    d_minus_B_prime: int
    eta_D: object
    in_degree_ok: bool
    z_ratio_ok: bool
    y_ratio_ok: bool
    bad_mass_ok: bool

    @property
    def passed(self) -> bool:
        return self.in_degree_ok and self.z_ratio_ok and self.y_ratio_ok and self.bad_mass_ok


def verify_degree_bounds(cfg: CouplingConfig) -> DegreeBoundReport:
    """Check ``d-(B) + d-(B') <= eta D`` and the pointwise ratio bounds."""
    if cfg.mode != "exact":
        raise InfeasibleRegime("degree bounds are checked on exact configs only")
    Y = cfg.ens_d1.Y
    dB = sum(Y[j] for j in cfg.bad)
    dBp = sum(Y[j] for j in cfg.bad_prime)
    bad = set(cfg.bad)
    return DegreeBoundReport(
        d_minus_B=dB, d_minus_B_prime=dBp, eta_D=cfg.eta * cfg.D,
        in_degree_ok=dB + dBp <= cfg.eta * cfg.D,
        z_ratio_ok=all(z <= cfg.Z_upper for z in cfg.ens_d.Z),
        y_ratio_ok=all(cfg.Y_lower <= y for j, y in enumerate(Y) if j not in bad),
        bad_mass_ok=sum(cfg.bad_weights, Fraction(0)) <= cfg.eta * cfg.D_hat,
    )


# -- chains -----------------------------------------------------------------------------


def _check_chain(configs: Sequence[CouplingConfig]) -> None:
    if not configs:
        raise DomainError("need at least one config")
    for a, b in zip(configs, configs[1:]):
        if a.n != b.n or b.d != a.d + 1:
            raise DomainError("configs must cover consecutive degrees d, d+1, ...")


@dataclass(frozen=True)
class ChainResult:
    graphs: tuple[Graph, ...]
    contained: bool


def chain_couple(n: int, d_start: int, steps: int, configs: Sequence[CouplingConfig], rng,
                 **step_kw) -> ChainResult:
    """Sample ``G_d``, then extend one degree at a time from the current top graph."""
    configs = list(configs)[:steps]
    if len(configs) != steps:
        raise DomainError(f"need {steps} configs")
    _check_chain(configs)
    if configs[0].n != n or configs[0].d != d_start:
        raise DomainError("first config must be for (n, d_start)")
    gen = _as_generator(rng)
    G = sample_from_ensemble(configs[0].ens_d, gen)
    graphs = [G]
    nested = True
    for cfg in configs:
        out = couple_step(cfg, gen, G_d=G, **step_kw)
        nested = nested and out.contained
        G = out.G_next
        graphs.append(G)
    return ChainResult(tuple(graphs), nested)


@dataclass
class CouplingRun:
    """Aggregated Monte Carlo statistics of repeated steps or chains."""

    samples: int
    class_counts: list[int]
    contained: int
    branches: dict[str, int]
    outcomes: list[CouplingOutcome] = field(default_factory=list)

    @property
    def containment_rate(self) -> float:
        return self.contained / self.samples

    def merge(self, other: CouplingRun) -> CouplingRun:
        br = dict(self.branches)
        for k, v in other.branches.items():
            br[k] = br.get(k, 0) + v
        return CouplingRun(self.samples + other.samples,
                           [a + b for a, b in zip(self.class_counts, other.class_counts)],
                           self.contained + other.contained, br,
                           self.outcomes + other.outcomes)


def run_steps(cfg: CouplingConfig, samples: int, rng, keep_outcomes: bool = False,
              **step_kw) -> CouplingRun:
    gen = _as_generator(rng)
    run = CouplingRun(0, [0] * len(cfg.ens_d1), 0, {ACCEPT: 0, DEMOTE: 0, FALLBACK: 0})
    for _ in range(samples):
        o = couple_step(cfg, gen, **step_kw)
        run.samples += 1
        run.class_counts[cfg.ens_d1.index(o.G_next)] += 1
        run.branches[o.branch] += 1
        run.contained += o.contained
        if keep_outcomes:
            run.outcomes.append(o)
    return run


def run_chains(configs: Sequence[CouplingConfig], samples: int, rng, **step_kw) -> CouplingRun:
    gen = _as_generator(rng)
    last = configs[-1].ens_d1
    counts = [0] * len(last)
    contained = 0
    for _ in range(samples):
        r = chain_couple(configs[0].n, configs[0].d, len(configs), configs, gen, **step_kw)
        counts[last.index(r.graphs[-1])] += 1
        contained += r.contained
    return CouplingRun(samples, counts, contained, {})
