"""Built-in graph corpus shared by ``disc-lab verify`` and the test suite."""

from __future__ import annotations

import numpy as np

from . import graph as g

CORPUS_SEED = 20240601


def named_corpus() -> list:
    graphs = [g.complete(n) for n in range(1, 9)]
    graphs += [g.empty(n) for n in (1, 2, 5)]
    graphs += [g.cycle(n) for n in range(3, 11)]
    graphs += [g.path(n) for n in (2, 3, 5, 8)]
    graphs += [g.star(k) for k in (1, 3, 6)]
    graphs += [g.complete_bipartite(a, b) for a, b in ((1, 2), (2, 2), (2, 3), (3, 3), (4, 4))]
    graphs += [g.turan(7, 3), g.turan(9, 3), g.petersen(), g.petersen().complement()]
    graphs += [g.paley(5), g.paley(13)]
    return graphs


def random_corpus(count: int = 200, max_n: int = 14, seed: int = CORPUS_SEED) -> list:
    """Seeded G(n, p) graphs with 2 <= n <= max_n and p uniform in [0.1, 0.9]."""
    rng = np.random.default_rng(seed)
    out = []
    for i in range(count):
        n = int(rng.integers(2, max_n + 1))
        p = round(float(rng.uniform(0.1, 0.9)), 3)
        out.append(g.gen_gnp(n, p, seed + i))
    return out


def regular_corpus(max_n: int = 500) -> list:
    """Regular instances of several sizes and densities (at least 30)."""
    graphs = [g.petersen(), g.complete(4), g.complete(6), g.complete_bipartite(3, 3), g.cycle(5), g.cycle(8)]
    graphs += [g.paley(13), g.paley(17), g.petersen().complement(), g.turan(12, 4)]
    graphs += [g.gen_blowup(g.cycle(5), k) for k in (2, 4, 10)]
    params = [(10, 3), (12, 4), (14, 5), (16, 3), (20, 6), (30, 4), (40, 8), (50, 10),
              (60, 7), (80, 12), (100, 4), (100, 16), (150, 10), (200, 8), (200, 30),
              (300, 10), (400, 20), (500, 16)]
    for i, (n, d) in enumerate(params):
        if n <= max_n:
            graphs.append(g.gen_random_regular(n, d, seed=i))
    return graphs


def small_corpus(max_n: int = 12) -> list:
    return [G for G in named_corpus() + random_corpus() if G.n <= max_n]
