"""Exact (rational) discrepancy quantities and brute-force optima on small graphs.

Everything here is exact: ``p = m / C(n, 2)`` is a ``Fraction`` and optima
come from enumerating all ``2**n`` subsets with integer numerators.
"""

from __future__ import annotations

import weakref
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Optional

import numpy as np

from . import kernels
from .errors import GuardError, InvariantError
from .graph import Graph
from .kernels import _common as slots

ENUMERATION_GUARD = 24
HARD_LIMIT = 40

CUT_KINDS = ("discPlus", "discMinus", "disc1Plus", "surplus", "deficit", "witness")


@dataclass(frozen=True)
class CutResult:
    """A vertex subset (or sign vector) together with its exact value.

    For ``disc1Plus`` the ``subset`` is the +1 side of ``assignment``; for
    ``surplus``/``deficit`` it is one side of the bipartition.
    """

    subset: tuple
    value: Fraction
    kind: str
    method: str
    seed: Optional[int] = None
    trial: Optional[int] = None
    assignment: Optional[tuple] = None

    def __post_init__(self):
        if self.kind not in CUT_KINDS:
            raise ValueError(f"unknown CutResult kind {self.kind!r}")

    def recompute(self, graph: Graph) -> Fraction:
        """Value of this result re-derived from the graph alone."""
        if self.kind == "disc1Plus":
            x = np.array(self.assignment, dtype=np.int64)
            return disc_vector(graph, x)
        if self.kind == "discMinus":
            return -disc_set(graph, self.subset)
        if self.kind in ("discPlus", "witness"):
            return disc_set(graph, self.subset)
        cut = cut_size(graph, self.subset)
        if self.kind == "surplus":
            return Fraction(2 * cut - graph.m, 2)
        size = len(self.subset)
        if size not in (graph.n // 2, graph.n - graph.n // 2):
            raise InvariantError(f"deficit witness of size {size} is not an equipartition")
        return Fraction(graph.m - 2 * cut, 2)

    def verify(self, graph: Graph) -> None:
        again = self.recompute(graph)
        if again != self.value:
            raise InvariantError(f"{self.kind} value {self.value} does not recompute ({again})")

    def to_json(self) -> dict:
        out = {
            "kind": self.kind,
            "value_num": self.value.numerator,
            "value_den": self.value.denominator,
            "subset": [int(v) for v in self.subset],
            "method": self.method,
        }
        if self.seed is not None:
            out["seed"] = self.seed
        if self.trial is not None:
            out["trial"] = self.trial
        if self.assignment is not None:
            out["assignment"] = [int(v) for v in self.assignment]
        return out

    @classmethod
    def from_json(cls, data: dict) -> CutResult:
        assignment = data.get("assignment")
        return cls(
            subset=tuple(data["subset"]),
            value=Fraction(data["value_num"], data["value_den"]),
            kind=data["kind"],
            method=data.get("method", ""),
            seed=data.get("seed"),
            trial=data.get("trial"),
            assignment=tuple(assignment) if assignment is not None else None,
        )


def _as_vertices(graph: Graph, subset) -> np.ndarray:
    verts = np.unique(np.asarray(list(subset), dtype=np.int64))
    if verts.size and (verts[0] < 0 or verts[-1] >= graph.n):
        raise GuardError(f"vertex out of range 0..{graph.n - 1}")
    return verts


def edges_within(graph: Graph, subset) -> int:
    verts = _as_vertices(graph, subset)
    return int(graph.adjacency[np.ix_(verts, verts)].sum()) // 2


def edges_between(graph: Graph, left, right) -> int:
    a = _as_vertices(graph, left)
    b = _as_vertices(graph, right)
    return int(graph.adjacency[np.ix_(a, b)].sum())


def cut_size(graph: Graph, subset) -> int:
    verts = _as_vertices(graph, subset)
    rest = np.setdiff1d(np.arange(graph.n), verts)
    return int(graph.adjacency[np.ix_(verts, rest)].sum())


def disc_set(graph: Graph, subset) -> Fraction:
    """disc(U) = e(U) - p * C(|U|, 2)."""
    verts = _as_vertices(graph, subset)
    return edges_within(graph, verts) - graph.density * comb(len(verts), 2)


def disc_pair(graph: Graph, left, right) -> Fraction:
    """disc(U, W) = e(U, W) - p |U| |W| for disjoint U, W."""
    a = _as_vertices(graph, left)
    b = _as_vertices(graph, right)
    if np.intersect1d(a, b).size:
        raise GuardError("disc_pair needs disjoint vertex sets")
    return edges_between(graph, a, b) - graph.density * (len(a) * len(b))


def disc_vector(graph: Graph, x):
    """Bilinear extension  sum_{edges} x_i x_j - p * sum_{i<j} x_i x_j.

    Integer (or Fraction) input gives an exact ``Fraction``; float input a float.
    """
    x = np.asarray(x)
    if x.shape != (graph.n,):
        raise GuardError(f"vector has shape {x.shape}, graph has n={graph.n}")
    if x.dtype.kind in "iub" or x.dtype == object:
        vals = [Fraction(v) for v in x.tolist()]
        edge_sum = sum((vals[u] * vals[v] for u, v in graph.edges()), Fraction(0))
        total = sum(vals, Fraction(0))
        squares = sum((v * v for v in vals), Fraction(0))
        return edge_sum - graph.density * (total * total - squares) / 2
    x = x.astype(np.float64)
    edge_sum = 0.5 * float(x @ graph.adjacency_matrix() @ x)
    p = float(graph.density)
    return edge_sum - 0.5 * p * (float(x.sum()) ** 2 - float(x @ x))


# enumeration ------------------------------------------------------------------

_extremes_cache: "weakref.WeakKeyDictionary[Graph, np.ndarray]" = weakref.WeakKeyDictionary()


def _check_guard(graph: Graph, allow_large: bool) -> None:
    if graph.n > HARD_LIMIT:
        raise GuardError(f"n={graph.n} is beyond the enumeration hard limit {HARD_LIMIT}")
    if graph.n > ENUMERATION_GUARD and not allow_large:
        raise GuardError(
            f"n={graph.n} exceeds the enumeration guard {ENUMERATION_GUARD}; pass allow_large=True"
        )


def subset_extremes(graph: Graph, allow_large: bool = False) -> np.ndarray:
    """Raw kernel output (integer numerators and winning masks), cached per graph."""
    _check_guard(graph, allow_large)
    cached = _extremes_cache.get(graph)
    if cached is None:
        indptr, indices = graph.csr
        cached = kernels.enumerate_subsets(indptr, indices, graph.n, graph.m)
        cached.setflags(write=False)
        _extremes_cache[graph] = cached
    return cached


def _mask_to_subset(mask: int, n: int) -> tuple:
    return tuple(v for v in range(n) if (mask >> v) & 1)


def _pairs_fraction(num: int, graph: Graph) -> Fraction:
    pairs = comb(graph.n, 2)
    return Fraction(num, pairs) if pairs else Fraction(0)


def disc_plus_exact(graph: Graph, allow_large: bool = False) -> CutResult:
    """Maximum of disc(U) over all subsets; ties go to the smallest bitmask."""
    stats = subset_extremes(graph, allow_large)
    return CutResult(
        subset=_mask_to_subset(int(stats[slots.DISC_MAX_MASK]), graph.n),
        value=_pairs_fraction(int(stats[slots.DISC_MAX]), graph),
        kind="discPlus",
        method="enumeration",
    )


def disc_minus_exact(graph: Graph, allow_large: bool = False) -> CutResult:
    stats = subset_extremes(graph, allow_large)
    return CutResult(
        subset=_mask_to_subset(int(stats[slots.DISC_MIN_MASK]), graph.n),
        value=-_pairs_fraction(int(stats[slots.DISC_MIN]), graph),
        kind="discMinus",
        method="enumeration",
    )


def disc1_plus_exact(graph: Graph, allow_large: bool = False) -> CutResult:
    """Maximum of disc(x) over x in {-1, 1}^n."""
    stats = subset_extremes(graph, allow_large)
    n = graph.n
    mask = int(stats[slots.DISC1_MAX_MASK])
    plus = _mask_to_subset(mask, n)
    assignment = tuple(1 if (mask >> v) & 1 else -1 for v in range(n))
    denom = n * (n - 1)
    value = Fraction(int(stats[slots.DISC1_MAX]), denom) if denom else Fraction(0)
    return CutResult(plus, value, "disc1Plus", "enumeration", assignment=assignment)


def surplus_exact(graph: Graph, allow_large: bool = False) -> CutResult:
    """max over bipartitions of e(U, U^c) - m/2."""
    stats = subset_extremes(graph, allow_large)
    cut = int(stats[slots.CUT_MAX])
    return CutResult(
        subset=_mask_to_subset(int(stats[slots.CUT_MAX_MASK]), graph.n),
        value=Fraction(2 * cut - graph.m, 2),
        kind="surplus",
        method="enumeration",
    )


def deficit_exact(graph: Graph, allow_large: bool = False) -> CutResult:
    """max over equipartitions (sizes floor(n/2), ceil(n/2)) of m/2 - e(U, U^c)."""
    stats = subset_extremes(graph, allow_large)
    cut = int(stats[slots.EQCUT_MIN])
    return CutResult(
        subset=_mask_to_subset(int(stats[slots.EQCUT_MIN_MASK]), graph.n),
        value=Fraction(graph.m - 2 * cut, 2),
        kind="deficit",
        method="enumeration",
    )
