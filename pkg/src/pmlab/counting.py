"""Exact counters and exhaustive enumerators.

These are the ground-truth oracles the asymptotic formulas are checked
against, so everything here is exact integer arithmetic.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from itertools import combinations
from typing import IO, Iterator, Sequence

from .config import DEFAULT_LIMITS, Limits
from .errors import CapExceeded, InfeasibleDegree
from .graph import Graph, complement, write_graph6_lines


def _pm_count_rows(rows: Sequence[int], mask: int) -> int:
    # Branch on the lowest unmatched vertex; memoise on the unmatched set.
    memo: dict[int, int] = {0: 1}

    def rec(m: int) -> int:
        hit = memo.get(m)
        if hit is not None:
            return hit
        low = m & -m
        u = low.bit_length() - 1
        rest = m ^ low
        cand = rows[u] & rest
        total = 0
        while cand:
            w = cand & -cand
            total += rec(rest ^ w)
            cand ^= w
        memo[m] = total
        return total

    return rec(mask)


def count_perfect_matchings(G: Graph) -> int:
    """Number of perfect matchings of ``G`` (0 when ``n`` is odd)."""
    if G.n % 2:
        return 0
    return _pm_count_rows(G.rows, (1 << G.n) - 1)


def count_pm_in_complement(G: Graph) -> int:
    return count_perfect_matchings(complement(G))


def count_pm_extensions(rows: Sequence[int], mask: int) -> int:
    """Perfect matchings of the subgraph induced on the vertex set ``mask``."""
    if mask.bit_count() % 2:
        return 0
    return _pm_count_rows(rows, mask)


def count_triangles(G: Graph) -> int:
    total = 0
    for u, r in enumerate(G.rows):
        higher = r >> (u + 1) << (u + 1)
        m = higher
        while m:
            low = m & -m
            v = low.bit_length() - 1
            total += (G.rows[v] & higher & ~((low << 1) - 1)).bit_count()
            m ^= low
    return total


def perfect_matchings(G: Graph) -> Iterator[tuple[tuple[int, int], ...]]:
    """Yield every perfect matching of ``G`` as a sorted tuple of edges."""
    if G.n % 2:
        return

    def rec(m: int, acc: list):
        if not m:
            yield tuple(acc)
            return
        low = m & -m
        u = low.bit_length() - 1
        rest = m ^ low
        cand = G.rows[u] & rest
        while cand:
            w = cand & -cand
            acc.append((u, w.bit_length() - 1))
            yield from rec(rest ^ w, acc)
            acc.pop()
            cand ^= w

    yield from rec((1 << G.n) - 1, [])


# -- enumeration of graphs with a given degree sequence ------------------------


def _check_degseq(g: Sequence[int], forbidden: Graph | None) -> int:
    n = len(g)
    if any(x < 0 or x >= max(n, 1) for x in g) and n > 0:
        raise InfeasibleDegree(f"degrees must lie in [0, n-1]: {list(g)}")
    if sum(g) % 2:
        raise InfeasibleDegree("degree sum must be even")
    if forbidden is not None and forbidden.n != n:
        raise ValueError("forbidden graph must have the same vertex count")
    return n


def iter_degseq_graphs(g: Sequence[int], forbidden: Graph | None = None) -> Iterator[Graph]:
    """Yield all simple graphs with degree sequence ``g`` avoiding ``forbidden``.

    Vertices are processed in order; vertex ``u`` picks its higher-indexed
    neighbours as a combination (lexicographic over neighbour lists), so the
    output order is deterministic.
    """
    n = _check_degseq(g, forbidden)
    banned = forbidden.rows if forbidden is not None else (0,) * n
    need = list(g)
    rows = [0] * n

    def feasible(u: int) -> bool:
        # every later vertex must still be able to reach its remaining degree
        for v in range(u + 1, n):
            r = need[v]
            if r == 0:
                continue
            avail = sum(1 for w in range(u + 1, n)
                        if w != v and need[w] > 0 and not (banned[v] >> w) & 1)
            if r > avail:
                return False
        return True

    def rec(u: int):
        if u == n:
            yield Graph(n, tuple(rows))
            return
        r = need[u]
        if r == 0:
            yield from rec(u + 1)
            return
        cand = [v for v in range(u + 1, n) if need[v] > 0 and not (banned[u] >> v) & 1]
        if len(cand) < r:
            return
        need[u] = 0
        for combo in combinations(cand, r):
            for v in combo:
                need[v] -= 1
                rows[u] |= 1 << v
                rows[v] |= 1 << u
            if feasible(u):
                yield from rec(u + 1)
            for v in combo:
                need[v] += 1
                rows[u] &= ~(1 << v)
                rows[v] &= ~(1 << u)
        need[u] = r

    yield from rec(0)


def enumerate_degseq_avoiding(g: Sequence[int], X: Graph | None = None,
                              limits: Limits = DEFAULT_LIMITS) -> int:
    """Exact number of simple graphs with degrees ``g`` sharing no edge with ``X``."""
    n = len(g)
    cap = limits.enum_cap(max(g, default=0))
    if n > cap:
        raise CapExceeded(f"n={n} exceeds enumeration cap {cap}")
    return sum(1 for _ in iter_degseq_graphs(g, X))


@dataclass
class Ensemble:
    """All labeled ``d``-regular graphs on ``n`` vertices with cached statistics.

    ``Y[i]`` counts perfect matchings of ``graphs[i]``, ``Z[i]`` those of its
    complement and ``X[i]`` its triangles.
    """

    n: int
    d: int
    graphs: list[Graph]
    Y: list[int]
    Z: list[int]
    X: list[int]
    _index: dict[Graph, int] = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if not self._index:
            self._index = {G: i for i, G in enumerate(self.graphs)}

    def __len__(self) -> int:
        return len(self.graphs)

    def index(self, G: Graph) -> int:
        return self._index[G]

    def __contains__(self, G: Graph) -> bool:
        return G in self._index

    def export(self, g6_fh: IO[str], csv_fh: IO[str]) -> None:
        """Write graph6 lines plus a CSV sidecar ``index,Y,Z,X``."""
        write_graph6_lines(self.graphs, g6_fh)
        w = csv.writer(csv_fh, lineterminator="\n")
        w.writerow(["index", "Y", "Z", "X"])
        for i in range(len(self.graphs)):
            w.writerow([i, self.Y[i], self.Z[i], self.X[i]])


def _check_regular_args(n: int, d: int, limits: Limits) -> None:
    if n < 0 or d < 0 or (n > 0 and d >= n) or (n * d) % 2:
        raise InfeasibleDegree(f"no {d}-regular graph on {n} vertices")
    cap = limits.enum_cap(d)
    if n > cap:
        raise CapExceeded(f"n={n} exceeds enumeration cap {cap} for d={d}")


def ensemble_from_graphs(n: int, d: int, graphs: list[Graph]) -> Ensemble:
    return Ensemble(
        n, d, graphs,
        Y=[count_perfect_matchings(G) for G in graphs],
        Z=[count_pm_in_complement(G) for G in graphs],
        X=[count_triangles(G) for G in graphs],
    )


def enumerate_regular(n: int, d: int, limits: Limits = DEFAULT_LIMITS) -> Ensemble:
    """Complete, duplicate-free list of labeled ``d``-regular graphs on ``n`` vertices."""
    _check_regular_args(n, d, limits)
    return ensemble_from_graphs(n, d, list(iter_degseq_graphs([d] * n)))


def enumerate_regular_by_complement(n: int, d: int, limits: Limits = DEFAULT_LIMITS) -> Ensemble:
    """Build G(n, d) as the complements of G(n, n-1-d)."""
    _check_regular_args(n, d, limits)
    dual = n - 1 - d
    _check_regular_args(n, dual, limits)
    graphs = sorted((complement(G) for G in iter_degseq_graphs([dual] * n)),
                    key=lambda G: G.rows)
    return ensemble_from_graphs(n, d, graphs)
