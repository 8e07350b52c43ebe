import io
import itertools

import pytest
from hypothesis import given, settings, strategies as st

from pmlab.counting import (count_perfect_matchings, count_pm_in_complement, count_triangles,
                            enumerate_degseq_avoiding, enumerate_regular,
                            enumerate_regular_by_complement, perfect_matchings)
from pmlab.errors import CapExceeded, InfeasibleDegree
from pmlab.graph import Graph, Matching, complement, decode_graph6, is_regular


def all_pairings(vertices):
    if not vertices:
        yield ()
        return
    u, rest = vertices[0], vertices[1:]
    for i, v in enumerate(rest):
        for tail in all_pairings(rest[:i] + rest[i + 1:]):
            yield ((u, v),) + tail


def brute_pm_count(G):
    if G.n % 2:
        return 0
    return sum(all(G.has_edge(u, v) for u, v in pm) for pm in all_pairings(list(range(G.n))))


def brute_triangles(G):
    return sum(G.has_edge(a, b) and G.has_edge(b, c) and G.has_edge(a, c)
               for a, b, c in itertools.combinations(range(G.n), 3))


def count_regular_by_edges(n, d):
    """Decide edges one at a time in lexicographic order; close a vertex when its last edge passes."""
    edges = list(itertools.combinations(range(n), 2))
    last = {u: max(i for i, e in enumerate(edges) if u in e) for u in range(n)}
    deg = [0] * n

    def go(i):
        if i == len(edges):
            return int(all(x == d for x in deg))
        u, v = edges[i]
        total = 0
        for take in (0, 1):
            if take and (deg[u] == d or deg[v] == d):
                continue
            deg[u] += take
            deg[v] += take
            if (last[u] != i or deg[u] == d) and (last[v] != i or deg[v] == d):
                total += go(i + 1)
            deg[u] -= take
            deg[v] -= take
        return total

    return go(0)


@st.composite
def small_graphs(draw, max_n=10):
    n = draw(st.integers(0, max_n))
    pairs = list(itertools.combinations(range(n), 2))
    keep = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return Graph.from_edges(n, [e for e, k in zip(pairs, keep) if k])


def prism():
    return complement(Graph.cycle(6))


def test_pm_counts_examples():
    assert count_perfect_matchings(Graph.complete(4)) == 3
    assert count_perfect_matchings(Graph.complete(6)) == 15
    assert count_perfect_matchings(Graph.cycle(6)) == 2
    assert count_perfect_matchings(prism()) == 4
    assert count_perfect_matchings(Graph.complete(5)) == 0


def test_complete_graph_formula():
    from math import factorial

    for n in range(2, 13, 2):
        assert count_perfect_matchings(Graph.complete(n)) == factorial(n) // (
            factorial(n // 2) * 2 ** (n // 2))


def test_complement_counts():
    pm = Matching([(0, 1), (2, 3), (4, 5)]).as_graph(6)
    assert count_pm_in_complement(pm) == 8
    assert count_pm_in_complement(Graph.empty(4)) == 3
    assert count_pm_in_complement(Graph.cycle(6)) == 4


def test_triangles():
    assert count_triangles(Graph.complete(4)) == 4
    assert count_triangles(Graph.cycle(6)) == 0
    assert count_triangles(prism()) == 2


@settings(max_examples=80, deadline=None)
@given(small_graphs())
def test_pm_count_matches_bruteforce(G):
    assert count_perfect_matchings(G) == brute_pm_count(G)
    assert count_triangles(G) == brute_triangles(G)
    listed = list(perfect_matchings(G))
    assert len(listed) == len(set(listed)) == count_perfect_matchings(G)


def test_sparse_counting_is_fast():
    from pmlab.sampler import sample_regular

    G = sample_regular(36, 4, 5)
    assert count_perfect_matchings(G) > 0


@pytest.mark.parametrize("n,d,size", [(4, 1, 3), (6, 2, 70), (6, 3, 70), (8, 3, 19355)])
def test_ensemble_sizes(ensembles, n, d, size):
    assert len(ensembles(n, d)) == size


def test_independent_edge_oracle():
    assert count_regular_by_edges(6, 3) == 70
    assert count_regular_by_edges(8, 3) == 19355


def test_ensemble_invariants(ensembles):
    for n, d in [(4, 1), (6, 2), (6, 3)]:
        ens = ensembles(n, d)
        assert len(set(ens.graphs)) == len(ens)
        assert all(is_regular(G, d) for G in ens.graphs)
        assert ens.Y == [count_perfect_matchings(G) for G in ens.graphs]
        assert ens.Z == [count_pm_in_complement(G) for G in ens.graphs]
        assert ens.X == [count_triangles(G) for G in ens.graphs]


def test_six_two_classes(ensembles):
    ens = ensembles(6, 2)
    two_triangles = [i for i, x in enumerate(ens.X) if x == 2]
    assert len(two_triangles) == 10
    assert {ens.Z[i] for i in two_triangles} == {6}
    assert sorted(set(ens.Z)) == [4, 6]


def test_double_counting(ensembles):
    assert sum(ensembles(6, 2).Z) == sum(ensembles(6, 3).Y) == 300
    assert sum(ensembles(4, 0).Z) == sum(ensembles(4, 1).Y) == 3


def test_complement_bijection(ensembles):
    by_comp = enumerate_regular_by_complement(6, 3)
    assert set(by_comp.graphs) == set(ensembles(6, 3).graphs)


def test_enumeration_order_is_deterministic():
    assert enumerate_regular(6, 2).graphs == enumerate_regular(6, 2).graphs


def test_degseq_avoiding():
    assert enumerate_degseq_avoiding([1, 1, 1, 1]) == 3
    assert enumerate_degseq_avoiding([2] * 6) == 70
    pm = Matching([(0, 1), (2, 3), (4, 5)]).as_graph(6)
    assert enumerate_degseq_avoiding([1] * 6, pm) == 8
    assert enumerate_degseq_avoiding([3] * 8) == 19355


def test_caps_and_feasibility():
    with pytest.raises(CapExceeded):
        enumerate_regular(12, 3)
    with pytest.raises(CapExceeded):
        enumerate_regular(14, 2)
    with pytest.raises(CapExceeded):
        enumerate_degseq_avoiding([3] * 12)
    with pytest.raises(InfeasibleDegree):
        enumerate_regular(5, 3)
    with pytest.raises(InfeasibleDegree):
        enumerate_regular(4, 4)


def test_export(ensembles):
    ens = ensembles(6, 3)
    g6, tab = io.StringIO(), io.StringIO()
    ens.export(g6, tab)
    lines = g6.getvalue().split()
    assert [decode_graph6(s) for s in lines] == ens.graphs
    rows = tab.getvalue().strip().split("\n")
    assert rows[0] == "index,Y,Z,X"
    assert len(rows) == 71
