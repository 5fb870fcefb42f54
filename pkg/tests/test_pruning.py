import itertools
from fractions import Fraction

import numpy as np
import pytest

from disclab.corpus import random_corpus
from disclab.errors import GuardError
from disclab.exact import disc_set
from disclab.graph import gen_gnp, gen_random_regular, path, petersen, star
from disclab.pruning import high_degree_expectation, high_degree_witness, prune_high_degree

F = Fraction


def test_regular_graph_unchanged():
    G = petersen()
    r = prune_high_degree(G, F(1, 2))
    assert r.high_set == () and r.f == 0
    assert np.array_equal(r.pruned.adjacency, G.adjacency)


def test_star():
    r = prune_high_degree(star(9), 0.1)
    assert r.threshold == F(198, 100)
    assert r.high_set == (0,)
    assert r.f == 9
    assert r.pruned.m == 0


def test_path():
    r = prune_high_degree(path(3), 0.1)
    assert r.high_set == (1,)
    assert r.f == 2


def test_delta_range():
    with pytest.raises(GuardError):
        prune_high_degree(path(3), 0)
    with pytest.raises(GuardError):
        prune_high_degree(path(3), 1)


@pytest.mark.parametrize("delta", [F(1, 10), F(1, 3), F(9, 10)])
def test_invariants_on_corpus(delta):
    for G in random_corpus(count=40, max_n=30, seed=8) + [gen_gnp(200, 0.05, 1)]:
        r = prune_high_degree(G, delta)
        limit = (1 + delta) * G.avg_degree
        high = set(r.high_set)
        for v in range(G.n):
            assert (G.degrees[v] > limit) == (v in high)
        assert r.pruned.m == G.m - r.f
        assert r.pruned.max_degree <= limit
        r.pruned.check_invariants()
        assert r.d0 == r.pruned.avg_degree


def test_witness_star_hits_exhaustive_max():
    G = star(9)
    delta = F(1, 10)
    # |Y| = floor(9 / 1.1) = 8 out of the 9 leaves
    best = max(disc_set(G, (0,) + Y) for Y in itertools.combinations(range(1, 10), 8))
    w = high_degree_witness(G, delta, trials=200, seed=0)
    assert w.value == best
    assert w.kind == "witness" and w.seed == 0
    w.verify(G)
    assert w.value >= high_degree_expectation(G, delta)


def test_expectation_matches_enumeration():
    G = gen_gnp(11, 0.3, 4)
    delta = F(1, 5)
    r = prune_high_degree(G, delta)
    assert r.high_set
    rest = [v for v in range(G.n) if v not in r.high_set]
    b = int(len(rest) / (1 + delta))
    values = [disc_set(G, r.high_set + Y) for Y in itertools.combinations(rest, b)]
    assert high_degree_expectation(G, delta) == sum(values, F(0)) / len(values)


def test_witness_is_deterministic():
    G = gen_gnp(40, 0.2, 2)
    a = high_degree_witness(G, 0.1, 30, seed=5)
    b = high_degree_witness(G, 0.1, 30, seed=5)
    assert a == b


def test_witness_needs_high_set():
    with pytest.raises(GuardError):
        high_degree_witness(gen_random_regular(10, 3, 0), 0.1, 10, 0)
