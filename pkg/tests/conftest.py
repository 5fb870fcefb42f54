import itertools
from fractions import Fraction
from math import comb

import pytest

from disclab import kernels


@pytest.fixture(params=kernels.available_backends())
def backend(request):
    """Run the test once per kernel backend."""
    with kernels.use_backend(request.param):
        yield request.param


def brute_disc_plus(G):
    """Independent oracle: plain loop over all subsets with Fraction arithmetic."""
    p = Fraction(G.m, comb(G.n, 2)) if G.n > 1 else Fraction(0)
    edges = [tuple(e) for e in G.edges().tolist()]
    best = None
    for mask in range(1 << G.n):
        inside = [(mask >> u) & 1 and (mask >> v) & 1 for u, v in edges]
        size = bin(mask).count("1")
        value = sum(inside) - p * comb(size, 2)
        if best is None or value > best:
            best = value
    return best


def brute_cut_extremes(G):
    """(max cut, min equipartition cut) by direct enumeration."""
    edges = [tuple(e) for e in G.edges().tolist()]
    n = G.n
    best_cut = 0
    best_eq = None
    for mask in range(1 << n):
        cut = sum(((mask >> u) & 1) != ((mask >> v) & 1) for u, v in edges)
        best_cut = max(best_cut, cut)
        if bin(mask).count("1") in (n // 2, n - n // 2):
            best_eq = cut if best_eq is None else min(best_eq, cut)
    return best_cut, best_eq


def sign_vectors(n):
    return itertools.product((-1, 1), repeat=n)
