"""High-degree vertex pruning and the random-extension witness for it."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import GuardError
from .exact import CutResult, disc_pair, disc_set
from .graph import Graph


def _as_fraction(x) -> Fraction:
    # str() keeps 0.1 as 1/10 instead of its binary expansion
    return x if isinstance(x, Fraction) else Fraction(str(x))


@dataclass(frozen=True)
class PruneReport:
    high_set: tuple
    f: int
    pruned: Graph
    d0: Fraction
    delta: Fraction
    threshold: Fraction


def prune_high_degree(graph: Graph, delta) -> PruneReport:
    """Drop every edge touching a vertex of degree > (1 + delta) d.

    ``f = e(X) + e(X, X^c)`` is the number of removed edges.
    """
    delta = _as_fraction(delta)
    if not (0 < delta < 1):
        raise GuardError(f"delta must lie in (0, 1), got {delta}")
    threshold = (1 + delta) * graph.avg_degree
    # exact comparison: deg > threshold  <=>  deg * den > num
    high = np.flatnonzero(graph.degrees * threshold.denominator > threshold.numerator)
    adj = graph.adjacency.copy()
    adj[high, :] = False
    adj[:, high] = False
    pruned = Graph(adj, name=f"pruned({graph.name})" if graph.name else "")
    f = graph.m - pruned.m
    return PruneReport(
        high_set=tuple(int(v) for v in high),
        f=f,
        pruned=pruned,
        d0=pruned.avg_degree,
        delta=delta,
        threshold=threshold,
    )


def high_degree_expectation(graph: Graph, delta) -> Fraction:
    """Exact mean of disc(X u Y) over uniform |Y| = floor(alpha s) subsets of X^c.

    alpha = 1/(1 + delta), s = |X^c|; uses E disc(X,Y) = (b/s) disc(X,X^c) and
    E disc(Y) = b(b-1)/(s(s-1)) disc(X^c).
    """
    report = prune_high_degree(graph, delta)
    high = list(report.high_set)
    rest = [v for v in range(graph.n) if v not in set(high)]
    s = len(rest)
    b = _sample_size(report.delta, s)
    total = disc_set(graph, high)
    if s:
        total += Fraction(b, s) * disc_pair(graph, high, rest)
    if s > 1:
        total += Fraction(b * (b - 1), s * (s - 1)) * disc_set(graph, rest)
    return total


def _sample_size(delta: Fraction, s: int) -> int:
    alpha = 1 / (1 + delta)
    return (alpha * s).numerator // (alpha * s).denominator


def high_degree_witness(graph: Graph, delta, trials: int, seed: int) -> CutResult:
    """Best X u Y over ``trials`` uniform subsets Y of X^c with |Y| = floor(s/(1+delta))."""
    report = prune_high_degree(graph, delta)
    if not report.high_set:
        raise GuardError("no vertex exceeds (1 + delta) d; the witness needs a non-empty high set")
    if trials < 1:
        raise GuardError("trials must be >= 1")
    high = np.array(report.high_set, dtype=np.int64)
    rest = np.setdiff1d(np.arange(graph.n), high)
    b = _sample_size(report.delta, len(rest))
    best = None
    for trial in range(trials):
        rng = np.random.default_rng([seed, trial])
        picked = rng.choice(rest, size=b, replace=False) if b else np.empty(0, np.int64)
        subset = tuple(sorted(int(v) for v in np.concatenate([high, picked])))
        value = disc_set(graph, subset)
        if best is None or value > best[0]:
            best = (value, subset, trial)
    value, subset, trial = best
    return CutResult(subset, value, "witness", "high-degree-sampling", seed=seed, trial=trial)
