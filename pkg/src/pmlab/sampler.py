"""Exactly uniform samplers for regular graphs and perfect matchings."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_LIMITS, Limits
from .counting import Ensemble, count_pm_extensions
from .errors import CapExceeded, DomainError, InfeasibleDegree, NoPerfectMatching
from .graph import Graph, Matching, complement


@dataclass(frozen=True)
class RngStream:
    """A reproducible random stream identified by ``(seed, stream)``.

    Distinct stream indices give statistically independent generators
    (``SeedSequence`` spawn keys).
    """

    seed: int
    stream: int = 0

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream,))
        return np.random.Generator(np.random.PCG64(ss))


def _as_generator(rng) -> np.random.Generator:
    if isinstance(rng, RngStream):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def sample_pm(n: int, rng) -> Matching:
    """Uniform perfect matching of K_n: pair up a uniform permutation."""
    if n % 2 or n < 0:
        raise DomainError("n must be even")
    gen = _as_generator(rng)
    perm = gen.permutation(n)
    return Matching(zip(perm[0::2].tolist(), perm[1::2].tolist()))


def sample_regular(n: int, d: int, rng, limits: Limits = DEFAULT_LIMITS,
                   max_tries: int = 1_000_000) -> Graph:
    """Uniform labeled ``d``-regular graph by configuration-model rejection.

    A uniform pairing of ``dn`` half-edges is accepted only when it has no
    loop or repeated edge; accepted pairings are uniform over simple graphs
    because every simple graph arises from exactly ``(d!)^n`` pairings.
    """
    if n < 0 or d < 0 or (n * d) % 2 or (n > 0 and d >= n):
        raise InfeasibleDegree(f"no {d}-regular graph on {n} vertices")
    if d > limits.config_model_max_d:
        raise CapExceeded(
            f"d={d} above configuration-model cap {limits.config_model_max_d}; "
            "sample a uniform index of an enumerated Ensemble instead")
    if n > limits.max_vertices:
        raise CapExceeded(f"n={n} exceeds vertex cap {limits.max_vertices}")
    gen = _as_generator(rng)
    points = np.repeat(np.arange(n), d)
    for _ in range(max_tries):
        perm = gen.permutation(points)
        a, b = perm[0::2], perm[1::2]
        if np.any(a == b):
            continue
        rows = [0] * n
        ok = True
        for u, v in zip(a.tolist(), b.tolist()):
            bit = 1 << v
            if rows[u] & bit:
                ok = False
                break
            rows[u] |= bit
            rows[v] |= 1 << u
        if ok:
            return Graph(n, tuple(rows))
    raise RuntimeError(f"no simple pairing in {max_tries} attempts")


def sample_from_ensemble(ens: Ensemble, rng) -> Graph:
    gen = _as_generator(rng)
    return ens.graphs[int(gen.integers(len(ens)))]


def sample_pm_complement(G: Graph, rng, method: str = "counting",
                         max_tries: int = 1_000_000) -> Matching:
    """Uniform perfect matching of the complement of ``G``.

    ``method="counting"``: match the lowest free vertex to each candidate
    partner with probability proportional to the number of perfect matchings
    that extend the choice. ``method="rejection"``: draw uniform perfect
    matchings of K_n until one avoids ``G``.
    """
    gen = _as_generator(rng)
    comp = complement(G)
    full = (1 << G.n) - 1
    if G.n % 2 or count_pm_extensions(comp.rows, full) == 0:
        raise NoPerfectMatching("complement has no perfect matching")
    if method == "rejection":
        for _ in range(max_tries):
            M = sample_pm(G.n, gen)
            if not any(G.has_edge(u, v) for u, v in M.edges):
                return M
        raise RuntimeError(f"no disjoint matching in {max_tries} attempts")
    if method != "counting":
        raise ValueError(f"unknown method {method!r}")
    mask = full
    edges = []
    while mask:
        low = mask & -mask
        u = low.bit_length() - 1
        rest = mask ^ low
        partners = []
        weights = []
        cand = comp.rows[u] & rest
        while cand:
            w = cand & -cand
            c = count_pm_extensions(comp.rows, rest ^ w)
            if c:
                partners.append(w)
                weights.append(c)
            cand ^= w
        total = sum(weights)
        # exact integer draw keeps the choice exactly proportional
        r = int(gen.integers(total)) if total < 2 ** 63 else _big_randbelow(gen, total)
        for w, c in zip(partners, weights):
            if r < c:
                break
            r -= c
        edges.append((u, w.bit_length() - 1))
        mask = rest ^ w
    return Matching(edges)


def _big_randbelow(gen: np.random.Generator, total: int) -> int:
    nbits = total.bit_length()
    while True:
        words = gen.integers(0, 2 ** 32, size=(nbits + 31) // 32, dtype=np.uint64)
        r = 0
        for x in words.tolist():
            r = (r << 32) | x
        r >>= 32 * len(words) - nbits
        if r < total:
            return r
