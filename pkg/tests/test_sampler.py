from collections import Counter

import numpy as np
import pytest

from pmlab.errors import CapExceeded, DomainError, InfeasibleDegree, NoPerfectMatching
from pmlab.graph import Graph, Matching, complement, encode_graph6, is_regular
from pmlab.counting import perfect_matchings
from pmlab.sampler import (RngStream, sample_from_ensemble, sample_pm, sample_pm_complement,
                           sample_regular)
from pmlab.stats import chi_square_two_sample, chi_square_uniform


def test_regular_sampler_uniform(ensembles):
    ens = ensembles(6, 2)
    gen = RngStream(11).generator()
    counts = [0] * len(ens)
    for _ in range(70_000):
        counts[ens.index(sample_regular(6, 2, gen))] += 1
    assert chi_square_uniform(counts)[1] > 1e-3


def test_regular_sampler_edge_cases():
    assert sample_regular(4, 3, 0) == Graph.complete(4)
    with pytest.raises(InfeasibleDegree):
        sample_regular(5, 3, 0)
    with pytest.raises(CapExceeded):
        sample_regular(30, 9, 0)
    G = sample_regular(40, 5, 1)
    assert is_regular(G, 5)


def test_sample_pm():
    assert sample_pm(2, 0).edges == frozenset({(0, 1)})
    gen = RngStream(2).generator()
    tally = Counter(sample_pm(4, gen) for _ in range(30_000))
    assert len(tally) == 3
    sigma = np.sqrt(30_000 * (1 / 3) * (2 / 3))
    assert all(abs(c - 10_000) <= 3 * sigma for c in tally.values())
    with pytest.raises(DomainError):
        sample_pm(5, 0)


def test_complement_pm_uniform_on_cycle():
    c6 = Graph.cycle(6)
    gen = RngStream(3).generator()
    tally = Counter(sample_pm_complement(c6, gen) for _ in range(20_000))
    assert set(tally) == {Matching(pm) for pm in perfect_matchings(complement(c6))}
    assert len(tally) == 4
    assert chi_square_uniform(list(tally.values()))[1] > 1e-3
    for M in tally:
        assert not any(c6.has_edge(u, v) for u, v in M)


def test_complement_pm_modes_agree():
    c6 = Graph.cycle(6)
    ga, gb = RngStream(4, 0).generator(), RngStream(4, 1).generator()
    a = Counter(sample_pm_complement(c6, ga) for _ in range(20_000))
    b = Counter(sample_pm_complement(c6, gb, method="rejection") for _ in range(20_000))
    keys = sorted(set(a) | set(b), key=lambda m: sorted(m))
    assert chi_square_two_sample([a[k] for k in keys], [b[k] for k in keys])[1] > 1e-3


def test_complement_pm_errors_and_trivial_case():
    with pytest.raises(NoPerfectMatching):
        sample_pm_complement(Graph.complete(4), 0)
    tally = Counter(sample_pm_complement(Graph.empty(4), s) for s in range(300))
    assert len(tally) == 3


def test_streams_are_reproducible(ensembles):
    a = [encode_graph6(sample_regular(10, 3, RngStream(5, s))) for s in range(4)]
    b = [encode_graph6(sample_regular(10, 3, RngStream(5, s))) for s in range(4)]
    assert a == b
    assert len(set(a)) > 1
    ens = ensembles(6, 3)
    assert sample_from_ensemble(ens, RngStream(9)) == sample_from_ensemble(ens, RngStream(9))
