"""Simple undirected graphs: dense representation, edge-list I/O, generators."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import comb

import numpy as np

from . import kernels
from .errors import (
    DuplicateEdgeError,
    GuardError,
    InvariantError,
    MalformedLineError,
    SelfLoopError,
    VertexRangeError,
)

MAX_VERTICES = 4000
REJECTION_CAP = 200


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable simple graph on vertices ``0..n-1``.

    ``adjacency`` is a read-only symmetric boolean matrix with a false
    diagonal; rows are also available bit-packed for popcount kernels.
    """

    adjacency: np.ndarray
    name: str = ""
    degrees: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        adj = np.array(self.adjacency, dtype=bool, copy=True)
        if adj.ndim != 2 or adj.shape[0] != adj.shape[1] or adj.shape[0] < 1:
            raise GuardError(f"adjacency must be a non-empty square matrix, got {adj.shape}")
        if adj.shape[0] > MAX_VERTICES:
            raise GuardError(f"n={adj.shape[0]} exceeds the {MAX_VERTICES}-vertex guard")
        if not np.array_equal(adj, adj.T):
            raise GuardError("adjacency is not symmetric")
        if adj.diagonal().any():
            raise GuardError("adjacency has self-loops")
        adj.setflags(write=False)
        degrees = adj.sum(axis=1).astype(np.int64)
        degrees.setflags(write=False)
        object.__setattr__(self, "adjacency", adj)
        object.__setattr__(self, "degrees", degrees)

    # constructors -----------------------------------------------------------

    @classmethod
    def from_edges(cls, n, edges, name=""):
        adj = np.zeros((n, n), dtype=bool)
        edges = np.asarray(list(edges), dtype=np.int64).reshape(-1, 2)
        if edges.size:
            if edges.min() < 0 or edges.max() >= n:
                raise GuardError("edge endpoint out of range")
            if np.any(edges[:, 0] == edges[:, 1]):
                raise GuardError("self-loop in edge set")
            adj[edges[:, 0], edges[:, 1]] = True
            adj[edges[:, 1], edges[:, 0]] = True
        return cls(adj, name=name)

    # basic accessors --------------------------------------------------------

    @property
    def n(self) -> int:
        return self.adjacency.shape[0]

    @cached_property
    def m(self) -> int:
        return int(self.degrees.sum()) // 2

    @property
    def density(self) -> Fraction:
        """p = m / C(n, 2), exact."""
        pairs = comb(self.n, 2)
        return Fraction(self.m, pairs) if pairs else Fraction(0)

    @property
    def avg_degree(self) -> Fraction:
        return Fraction(2 * self.m, self.n)

    @property
    def max_degree(self) -> int:
        return int(self.degrees.max())

    @property
    def is_regular(self) -> bool:
        return bool(np.all(self.degrees == self.degrees[0]))

    def has_edge(self, u, v) -> bool:
        return bool(self.adjacency[u, v])

    def neighbors(self, v) -> np.ndarray:
        return np.flatnonzero(self.adjacency[v])

    def edges(self) -> np.ndarray:
        """Edges as an (m, 2) array of pairs u < v in lexicographic order."""
        return self._edge_array

    @cached_property
    def _edge_array(self) -> np.ndarray:
        u, v = np.nonzero(np.triu(self.adjacency, 1))
        out = np.column_stack([u, v]).astype(np.int64)
        out.setflags(write=False)
        return out

    @cached_property
    def csr(self):
        indptr = np.zeros(self.n + 1, dtype=np.int64)
        np.cumsum(self.degrees, out=indptr[1:])
        indices = np.nonzero(self.adjacency)[1].astype(np.int64)
        return indptr, indices

    @cached_property
    def packed_rows(self) -> np.ndarray:
        """Rows as little-endian uint64 words (bit j of word b is column 64b + j)."""
        words = (self.n + 63) // 64
        packed = np.packbits(self.adjacency, axis=1, bitorder="little")
        padded = np.zeros((self.n, words * 8), dtype=np.uint8)
        padded[:, : packed.shape[1]] = packed
        return padded.view("<u8").reshape(self.n, words)

    def adjacency_matrix(self) -> np.ndarray:
        return self.adjacency.astype(np.float64)

    def complement(self) -> Graph:
        comp = ~self.adjacency
        np.fill_diagonal(comp, False)
        return Graph(comp, name=f"complement({self.name})" if self.name else "")

    def check_invariants(self):
        adj = self.adjacency
        if not np.array_equal(adj, adj.T) or adj.diagonal().any():
            raise InvariantError("adjacency lost symmetry or gained a loop")
        if not np.array_equal(adj.sum(axis=1), self.degrees):
            raise InvariantError("degree array disagrees with adjacency rows")
        if int(self.degrees.sum()) != 2 * self.m:
            raise InvariantError("degree sum is not 2m")

    def __repr__(self):
        label = f"{self.name!r}, " if self.name else ""
        return f"Graph({label}n={self.n}, m={self.m})"


# edge-list I/O ----------------------------------------------------------------


def from_edge_list(text: str, name: str = "") -> Graph:
    """Parse the ``"n m"`` header + ``"u v"`` line format (0-indexed).

    Blank lines and lines starting with ``#`` are skipped; line numbers in
    errors refer to the original document.
    """
    lines = [
        (no, raw.split())
        for no, raw in enumerate(text.splitlines(), start=1)
        if raw.strip() and not raw.lstrip().startswith("#")
    ]
    if not lines:
        raise MalformedLineError("missing 'n m' header", 1)
    head_no, head = lines[0]
    try:
        if len(head) != 2:
            raise ValueError
        n, m = int(head[0]), int(head[1])
    except ValueError:
        raise MalformedLineError(f"header must be 'n m', got {' '.join(head)!r}", head_no) from None
    if n < 1 or m < 0:
        raise MalformedLineError(f"header needs n >= 1 and m >= 0, got n={n} m={m}", head_no)

    seen = set()
    edges = []
    for no, parts in lines[1:]:
        if len(edges) == m:
            raise MalformedLineError(f"more than the declared {m} edges", no)
        try:
            if len(parts) != 2:
                raise ValueError
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise MalformedLineError(f"expected 'u v', got {' '.join(parts)!r}", no) from None
        if not (0 <= u < n and 0 <= v < n):
            raise VertexRangeError(f"vertex out of range 0..{n - 1} in '{u} {v}'", no)
        if u == v:
            raise SelfLoopError(f"self-loop at vertex {u}", no)
        key = (min(u, v), max(u, v))
        if key in seen:
            raise DuplicateEdgeError(f"duplicate edge {key[0]} {key[1]}", no)
        seen.add(key)
        edges.append(key)
    if len(edges) != m:
        last = lines[-1][0]
        raise MalformedLineError(f"declared {m} edges, found {len(edges)}", last + 1)
    return Graph.from_edges(n, edges, name=name)


def to_edge_list(graph: Graph) -> str:
    rows = [f"{graph.n} {graph.m}"]
    rows.extend(f"{u} {v}" for u, v in graph.edges())
    return "\n".join(rows) + "\n"


# generators -------------------------------------------------------------------


def _is_simple_pairing(pairs, n):
    lo = np.minimum(pairs[:, 0], pairs[:, 1])
    hi = np.maximum(pairs[:, 0], pairs[:, 1])
    if np.any(lo == hi):
        return False
    return np.unique(lo * n + hi).size == len(pairs)


def gen_random_regular(n: int, d: int, seed: int, rejection_cap: int = REJECTION_CAP) -> Graph:
    """Random simple d-regular graph from the configuration model.

    Whole pairings are resampled up to ``rejection_cap`` times; after that
    the last pairing is repaired with simplicity-preserving double-edge
    swaps. For ``d > (n-1)/2`` the complement of a random
    ``(n-1-d)``-regular graph is returned (complementation is a bijection,
    so the distribution stays uniform over simple pairings).
    """
    if n < 1 or not (0 <= d < n):
        raise GuardError(f"need 0 <= d < n, got n={n} d={d}")
    if (n * d) % 2:
        raise GuardError(f"n*d must be even, got n={n} d={d}")
    name = f"rr:n={n},d={d},seed={seed}"
    if 2 * d > n - 1:
        comp = gen_random_regular(n, n - 1 - d, seed, rejection_cap)
        return Graph(comp.complement().adjacency, name=name)
    if d == 0:
        return Graph(np.zeros((n, n), dtype=bool), name=name)

    rng = np.random.default_rng(seed)
    stubs = np.repeat(np.arange(n, dtype=np.int64), d)
    pairs = None
    for _ in range(rejection_cap):
        pairs = rng.permutation(stubs).reshape(-1, 2)
        if _is_simple_pairing(pairs, n):
            return Graph.from_edges(n, pairs, name=name)

    edges = np.ascontiguousarray(pairs)
    m = len(edges)
    budget = 200 * m + 100_000
    chunk = 4 * m + 1024
    spent = 0
    while spent < budget:
        draws = rng.random((chunk, 2))
        used, remaining = kernels.repair_pairing(edges, n, draws, 10_000)
        spent += used
        if remaining == 0:
            return Graph.from_edges(n, edges, name=name)
    raise GuardError(f"edge-swap repair budget exhausted for n={n} d={d} seed={seed}")


def gen_gnp(n: int, p: float, seed: int) -> Graph:
    """Erdos-Renyi G(n, p): each pair independently with probability p."""
    if n < 1 or not (0 <= p <= 1):
        raise GuardError(f"need n >= 1 and 0 <= p <= 1, got n={n} p={p}")
    rng = np.random.default_rng(seed)
    upper = np.triu(rng.random((n, n)) < p, 1)
    return Graph(upper | upper.T, name=f"gnp:n={n},p={p:g},seed={seed}")


def complete(n):
    if n < 1:
        raise GuardError("complete graph needs n >= 1")
    adj = ~np.eye(n, dtype=bool)
    return Graph(adj, name=f"K{n}")


def empty(n):
    if n < 1:
        raise GuardError("empty graph needs n >= 1")
    return Graph(np.zeros((n, n), dtype=bool), name=f"empty{n}")


def cycle(n):
    if n < 3:
        raise GuardError("cycle needs n >= 3")
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)], name=f"C{n}")


def path(n):
    if n < 1:
        raise GuardError("path needs n >= 1")
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)], name=f"P{n}")


def star(leaves):
    if leaves < 1:
        raise GuardError("star needs at least one leaf")
    return Graph.from_edges(leaves + 1, [(0, i) for i in range(1, leaves + 1)], name=f"K1,{leaves}")


def complete_bipartite(a, b):
    if a < 1 or b < 1:
        raise GuardError("complete bipartite graph needs both parts non-empty")
    edges = [(i, a + j) for i in range(a) for j in range(b)]
    return Graph.from_edges(a + b, edges, name=f"K{a},{b}")


def turan(n, r):
    """Complete r-partite graph with parts of size floor(n/r) or ceil(n/r)."""
    if n < 1 or not (1 <= r <= n):
        raise GuardError(f"turan needs 1 <= r <= n, got n={n} r={r}")
    part = np.arange(n) % r
    adj = part[:, None] != part[None, :]
    return Graph(adj, name=f"T{r}({n})")


def petersen():
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return Graph.from_edges(10, outer + spokes + inner, name="petersen")


def paley(q):
    """Paley graph on Z_q for a prime q = 1 (mod 4)."""
    if q < 5 or q % 4 != 1 or any(q % k == 0 for k in range(2, int(q**0.5) + 1)):
        raise GuardError(f"paley needs a prime q = 1 mod 4, got {q}")
    squares = {(x * x) % q for x in range(1, q)}
    diff = (np.arange(q)[:, None] - np.arange(q)[None, :]) % q
    adj = np.isin(diff, list(squares))
    np.fill_diagonal(adj, False)
    return Graph(adj, name=f"paley{q}")


NAMED_FAMILIES = {
    "complete": complete,
    "empty": empty,
    "cycle": cycle,
    "path": path,
    "star": star,
    "complete_bipartite": complete_bipartite,
    "turan": turan,
    "petersen": petersen,
    "paley": paley,
}


def gen_named(family: str, *params) -> Graph:
    try:
        builder = NAMED_FAMILIES[family]
    except KeyError:
        raise GuardError(f"unknown family {family!r}; known: {sorted(NAMED_FAMILIES)}") from None
    try:
        return builder(*params)
    except TypeError as exc:
        raise GuardError(f"bad parameters for {family}: {exc}") from None


def gen_blowup(graph: Graph, k: int) -> Graph:
    """Replace each vertex by an independent k-set; adjacent sets are fully joined.

    Vertex ``v`` of the original becomes ``v*k .. v*k + k - 1``.
    """
    if k < 1:
        raise GuardError("blow-up factor must be >= 1")
    if graph.n * k > MAX_VERTICES:
        raise GuardError(f"blow-up would have {graph.n * k} vertices (guard {MAX_VERTICES})")
    adj = np.kron(graph.adjacency, np.ones((k, k), dtype=bool))
    label = graph.name or f"G{graph.n}"
    return Graph(adj, name=f"blowup({label},{k})")
