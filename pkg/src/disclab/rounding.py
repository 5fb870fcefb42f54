"""Hyperplane rounding of unit-vector assignments and the set conversions built on it."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import comb
from typing import Optional

import numpy as np

from .errors import GuardError, InvariantError
from .exact import CutResult, disc_set, disc_vector
from .graph import Graph

DEFAULT_DELTA = 1e-4
EXPECTATION_GUARD = 3000
NORM_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class RoundingEnsemble:
    """Unit vectors y_v, one per vertex.

    For the sparse assignment the vectors are y_v = x_v / ||x_v|| with
    x_v = e_v + z A[v]; projections then cost O(m) per trial and the dense
    matrix is only materialised on request.
    """

    source: str
    z: float = 0.0
    delta: float = DEFAULT_DELTA
    regime: str = ""
    factor: Optional[np.ndarray] = None  # sdpFactor: rows are the vectors
    graph: Optional[Graph] = None  # sparseAssignment: the defining graph

    @property
    def n(self) -> int:
        return self.graph.n if self.factor is None else self.factor.shape[0]

    @property
    def dim(self) -> int:
        return self.n if self.factor is None else self.factor.shape[1]

    @cached_property
    def _norms(self) -> np.ndarray:
        degrees = self.graph.degrees.astype(np.float64)
        return np.sqrt(1.0 + degrees * self.z * self.z)

    @cached_property
    def vectors(self) -> np.ndarray:
        if self.factor is not None:
            return self.factor
        x = np.eye(self.n) + self.z * self.graph.adjacency_matrix()
        return x / self._norms[:, None]

    def project(self, W: np.ndarray) -> np.ndarray:
        """<y_v, w> for every vertex (rows) and every column w of ``W``."""
        if self.factor is not None:
            return self.factor @ W
        indptr, indices = self.graph.csr
        # (A W)[v] as a segment sum over the CSR neighbour lists
        gathered = W[indices]
        starts = indptr[:-1]
        neigh = np.zeros_like(W)
        nonempty = indptr[1:] > starts
        if gathered.shape[0]:
            sums = np.add.reduceat(gathered, starts[nonempty], axis=0)
            neigh[nonempty] = sums
        return (W + self.z * neigh) / self._norms[:, None]

    def gram(self) -> np.ndarray:
        if self.n > EXPECTATION_GUARD:
            raise GuardError(f"all-pairs inner products need n <= {EXPECTATION_GUARD}, got {self.n}")
        if self.factor is not None:
            return self.factor @ self.factor.T
        A = self.graph.adjacency_matrix()
        x_gram = np.eye(self.n) + 2 * self.z * A + self.z * self.z * (A @ A)
        return x_gram / np.outer(self._norms, self._norms)

    def angles(self) -> np.ndarray:
        """beta_{u,v} = arcsin <y_u, y_v> = pi/2 - alpha_{u,v}."""
        return np.arcsin(np.clip(self.gram(), -1.0, 1.0))

    def check_invariants(self) -> None:
        if self.factor is not None:
            norms = np.linalg.norm(self.factor, axis=1)
        else:
            norms = np.linalg.norm(self.vectors, axis=1) if self.n <= EXPECTATION_GUARD else np.ones(self.n)
        if np.any(np.abs(norms - 1) > NORM_TOL):
            raise InvariantError(f"ensemble vector norms deviate from 1 by {np.abs(norms - 1).max():.3e}")
        if self.source != "sparseAssignment" or self.n > EXPECTATION_GUARD:
            return
        g = self.gram()
        adj = self.graph.adjacency
        off = ~np.eye(self.n, dtype=bool)
        if adj.any() and g[adj].min() < self.z / 2 - NORM_TOL:
            raise InvariantError(f"adjacent inner product {g[adj].min():.3e} < z/2 = {self.z / 2:.3e}")
        non = off & ~adj
        cap = self.graph.max_degree * self.z**2
        if non.any() and g[non].max() > cap + NORM_TOL:
            raise InvariantError(f"non-adjacent inner product {g[non].max():.3e} > Delta z^2 = {cap:.3e}")
        deg = self.graph.degrees
        codegree_total = int(np.sum(deg * (deg - 1)))
        if codegree_total > self.n * self.graph.max_degree**2:
            raise InvariantError("sum of common-neighbour counts exceeds n Delta^2")


def sparse_weight(n: int, d: float, delta: float = DEFAULT_DELTA) -> tuple:
    """(z, regime): delta/sqrt(d) if d <= n^(2/3), else delta n / d^2."""
    if d <= 0:
        return 0.0, "edgeless"
    if d <= n ** (2 / 3):
        return delta / math.sqrt(d), "sqrt"
    return delta * n / d**2, "dense"


def build_sparse_vectors(graph: Graph, delta: float = DEFAULT_DELTA) -> RoundingEnsemble:
    if not (delta > 0):
        raise GuardError(f"delta must be positive, got {delta}")
    z, regime = sparse_weight(graph.n, float(graph.avg_degree), delta)
    return RoundingEnsemble("sparseAssignment", z=z, delta=delta, regime=regime, graph=graph)


def factor_ensemble(V: np.ndarray) -> RoundingEnsemble:
    """Normalised rows of a factor; zero rows become a fixed unit vector."""
    V = np.array(V, dtype=np.float64)
    norms = np.linalg.norm(V, axis=1)
    zero = norms < 1e-300
    V[zero] = 0.0
    V[zero, 0] = 1.0
    norms[zero] = 1.0
    return RoundingEnsemble("sdpFactor", factor=V / norms[:, None])


# trials ---------------------------------------------------------------------------


def _trial_normals(dim: int, seed: int, trials: range) -> np.ndarray:
    # one independent stream per (seed, trial): any trial can be replayed alone
    out = np.empty((dim, len(trials)))
    for j, trial in enumerate(trials):
        out[:, j] = np.random.default_rng([seed, trial]).standard_normal(dim)
    return out


def trial_memberships(ens: RoundingEnsemble, trials: int, seed: int, chunk: int = 256) -> np.ndarray:
    """Boolean (trials, n): vertex v is in U_t iff <y_v, w_t> >= 0."""
    if trials < 1:
        raise GuardError("trials must be >= 1")
    out = np.empty((trials, ens.n), dtype=bool)
    for start in range(0, trials, chunk):
        block = range(start, min(trials, start + chunk))
        W = _trial_normals(ens.dim, seed, block)
        out[block.start : block.stop] = (ens.project(W) >= 0).T
    return out


def _edges_inside(graph: Graph, member: np.ndarray) -> np.ndarray:
    edges = graph.edges()
    if not len(edges):
        return np.zeros(member.shape[0], dtype=np.int64)
    return np.sum(member[:, edges[:, 0]] & member[:, edges[:, 1]], axis=1)


def trial_values(ens: RoundingEnsemble, graph: Graph, trials: int, seed: int) -> np.ndarray:
    """disc(U_t) for every trial, as floats (edge counts are exact integers)."""
    member = trial_memberships(ens, trials, seed)
    sizes = member.sum(axis=1)
    p = float(graph.density)
    return _edges_inside(graph, member) - p * sizes * (sizes - 1) / 2


def hyperplane_round(ens: RoundingEnsemble, graph: Graph, trials: int, seed: int) -> CutResult:
    """Best U = {v : <y_v, w> >= 0} over ``trials`` Gaussian directions w."""
    if ens.n != graph.n:
        raise GuardError("ensemble and graph sizes differ")
    member = trial_memberships(ens, trials, seed)
    # exact comparison: 2 C(n,2) disc(U) = 2 C(n,2) e(U) - 2m C(|U|,2) is an integer
    sizes = member.sum(axis=1).astype(np.int64)
    pairs = comb(graph.n, 2)
    nums = [pairs * int(e) - graph.m * comb(int(s), 2) for e, s in zip(_edges_inside(graph, member), sizes)]
    best = int(np.argmax(nums))  # first maximum: smallest trial index wins ties
    subset = tuple(int(v) for v in np.flatnonzero(member[best]))
    value = disc_set(graph, subset)
    return CutResult(subset, value, "discPlus", "hyperplane", seed=seed, trial=best)


def trace_csv(values) -> str:
    from .io import fmt_float

    lines = ["trial,disc"] + [f"{i},{fmt_float(v)}" for i, v in enumerate(values)]
    return "\n".join(lines) + "\n"


# analytics ------------------------------------------------------------------------


def expected_disc(ens: RoundingEnsemble, graph: Graph) -> float:
    """E disc(U) for one trial: (1/2 pi)(sum_{uv in E} beta - p sum_{u<v} beta)."""
    if graph.n > EXPECTATION_GUARD:
        raise GuardError(f"expected_disc needs n <= {EXPECTATION_GUARD}, got {graph.n}")
    beta = ens.angles()
    np.fill_diagonal(beta, 0.0)
    on_edges = float(np.sum(beta[graph.adjacency])) / 2
    everywhere = float(beta.sum()) / 2
    return (on_edges - float(graph.density) * everywhere) / (2 * math.pi)


def pair_inclusion_probability(ens: RoundingEnsemble, u: int, v: int) -> float:
    """P(u and v both in U) = (pi - alpha_{u,v}) / (2 pi)."""
    y = ens.vectors
    cos = float(np.clip(y[u] @ y[v], -1.0, 1.0))
    return (math.pi - math.acos(cos)) / (2 * math.pi)


def arcsin_bounds_check(ens: RoundingEnsemble) -> dict:
    """t <= arcsin t <= t + t^2 for every realised inner product 0 <= t <= 1/2."""
    g = ens.gram()
    off = g[~np.eye(g.shape[0], dtype=bool)]
    if off.size and off.max() > 0.5:
        raise GuardError(f"inner product {off.max():.3g} > 1/2 is outside the arcsin regime")
    t = off[off >= 0]
    if not t.size:
        return {"checked": 0, "passed": True, "min_lower_slack": 0.0, "min_upper_slack": 0.0}
    beta = np.arcsin(t)
    lower = beta - t
    upper = t + t * t - beta
    return {
        "checked": int(t.size),
        "passed": bool(lower.min() >= -1e-15 and upper.min() >= -1e-15),
        "min_lower_slack": float(lower.min()),
        "min_upper_slack": float(upper.min()),
    }


# set conversions ------------------------------------------------------------------


def pm1_to_subset(graph: Graph, x) -> CutResult:
    """The better of U = {x = +1} and its complement; at least disc(x)/4 exactly."""
    x = np.asarray(x)
    if x.shape != (graph.n,) or not np.all(np.isin(x, (-1, 1))):
        raise GuardError("x must be a +-1 vector of length n")
    x = x.astype(np.int64)
    plus = tuple(int(v) for v in np.flatnonzero(x == 1))
    minus = tuple(int(v) for v in np.flatnonzero(x == -1))
    a, b = disc_set(graph, plus), disc_set(graph, minus)
    subset, value = (plus, a) if a >= b else (minus, b)
    whole = disc_vector(graph, x)
    if value < whole / 4:
        raise InvariantError(f"better side {value} < disc(x)/4 = {whole / 4}")
    return CutResult(subset, value, "discPlus", "pm1-split", assignment=tuple(int(v) for v in x))


def set_to_bisection(graph: Graph, subset, trials: int = 500, seed: int = 0) -> CutResult:
    """Extend U by a random Z of U^c to an equipartition; keep the largest deficit.

    For a regular graph and fixed |Y|, deficit and disc(Y) are both increasing
    in e(Y), so the returned Y also maximises disc(Y) among the samples.
    """
    if not graph.is_regular:
        raise GuardError("set_to_bisection needs a regular graph")
    U = np.unique(np.asarray(list(subset), dtype=np.int64))
    half = graph.n // 2
    if len(U) > half:
        raise GuardError(f"|U| = {len(U)} > n/2; pass the smaller side")
    if disc_set(graph, U) <= 0:
        raise GuardError("set_to_bisection needs disc(U) > 0")
    if trials < 1:
        raise GuardError("trials must be >= 1")
    rest = np.setdiff1d(np.arange(graph.n), U)
    extra = half - len(U)
    adj = graph.adjacency
    best = None
    for trial in range(trials if extra else 1):
        rng = np.random.default_rng([seed, trial])
        Z = rng.choice(rest, size=extra, replace=False) if extra else np.empty(0, np.int64)
        member = np.zeros(graph.n, dtype=bool)
        member[U] = True
        member[Z] = True
        cut = int(adj[np.ix_(member, ~member)].sum())
        if best is None or cut < best[0]:
            best = (cut, member, trial)
    cut, member, trial = best
    return CutResult(
        tuple(int(v) for v in np.flatnonzero(member)),
        Fraction(graph.m - 2 * cut, 2),
        "deficit",
        "random-extension",
        seed=seed,
        trial=trial,
    )
