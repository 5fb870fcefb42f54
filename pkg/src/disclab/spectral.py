"""Adjacency spectra and the spectral statistics built from them."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

import numpy as np

from . import kernels
from .errors import ConvergenceError, GuardError, InvariantError
from .graph import MAX_VERTICES, Graph

OFF_DIAGONAL_RTOL = 1e-12
MAX_SWEEPS = 100
POSITIVE_RTOL = 1e-9


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Eigenvalues in descending order with matching orthonormal eigenvector columns.

    Each eigenvector is signed so that its largest-magnitude coordinate is
    positive (first such coordinate on ties).
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    residual: float
    orthogonality: float
    sweeps: int = 0
    off_norm: float = 0.0
    method: str = "jacobi"

    @property
    def n(self) -> int:
        return len(self.eigenvalues)

    @property
    def unit(self) -> np.ndarray:
        """The normalised all-ones vector e."""
        return np.full(self.n, 1.0 / math.sqrt(self.n))

    def check_invariants(self, graph: Graph, tol: float = 1e-8) -> None:
        lam = self.eigenvalues
        if self.orthogonality > tol:
            raise InvariantError(f"eigenvectors not orthonormal: max |V'V - I| = {self.orthogonality:.3e}")
        if self.residual > tol:
            raise InvariantError(f"eigen-residual {self.residual:.3e} exceeds {tol:g}")
        if abs(lam.sum()) > 1e-6 * self.n:
            raise InvariantError(f"trace identity broken: sum of eigenvalues = {lam.sum():.3e}")
        two_m = 2 * graph.m
        sq = float(np.sum(lam * lam))
        if abs(sq - two_m) > 1e-8 * max(two_m, 1):
            raise InvariantError(f"sum of squared eigenvalues {sq!r} != 2m = {two_m}")
        if np.any(np.diff(lam) > 0):
            raise InvariantError("eigenvalues are not sorted in descending order")


def _finish(matrix, w, v, method, sweeps=0, off=0.0) -> Spectrum:
    order = np.argsort(-w, kind="stable")
    w = w[order]
    v = v[:, order]
    pivots = np.argmax(np.abs(v), axis=0)
    signs = np.where(v[pivots, np.arange(v.shape[1])] < 0, -1.0, 1.0)
    v = v * signs
    scale = float(np.linalg.norm(matrix))
    resid = float(np.linalg.norm(matrix @ v - v * w))
    residual = resid / scale if scale > 0 else resid
    ortho = float(np.max(np.abs(v.T @ v - np.eye(len(w))))) if len(w) else 0.0
    w.setflags(write=False)
    v.setflags(write=False)
    return Spectrum(w, v, residual, ortho, sweeps, off, method)


@lru_cache(maxsize=8)
def _schedule(n):
    return kernels.round_robin_schedule(n)


def symmetric_eigh(matrix, method: str = "jacobi") -> Spectrum:
    """Full eigendecomposition of a real symmetric matrix.

    ``method="jacobi"`` runs the cyclic Jacobi kernel until the off-diagonal
    Frobenius norm is at most 1e-12 of the matrix norm (100 sweeps max);
    ``method="lapack"`` defers to ``numpy.linalg.eigh``.
    """
    a = np.ascontiguousarray(matrix, dtype=np.float64)
    n = a.shape[0]
    if a.ndim != 2 or a.shape != (n, n):
        raise GuardError(f"need a square matrix, got shape {a.shape}")
    if n > MAX_VERTICES:
        raise GuardError(f"n={n} exceeds the {MAX_VERTICES} eigensolver guard")
    if not np.allclose(a, a.T, rtol=0, atol=1e-12 * max(1.0, float(np.abs(a).max(initial=0)))):
        raise GuardError("matrix is not symmetric")
    if method == "lapack":
        w, v = np.linalg.eigh(a)
        return _finish(a, w, v, "lapack")
    if method != "jacobi":
        raise GuardError(f"unknown eigensolver {method!r}")
    tol = OFF_DIAGONAL_RTOL * float(np.linalg.norm(a))
    w, v, sweeps, off = kernels.jacobi_eigh(a, _schedule(n), tol, MAX_SWEEPS)
    if off > tol:
        raise ConvergenceError(
            f"Jacobi did not converge in {sweeps} sweeps (off-diagonal norm {off:.3e})",
            sweeps=sweeps,
            off_norm=off,
        )
    return _finish(a, np.asarray(w), np.asarray(v), "jacobi", int(sweeps), float(off))


def eigendecompose(graph: Graph, method: str = "jacobi") -> Spectrum:
    return symmetric_eigh(graph.adjacency_matrix(), method=method)


@dataclass(frozen=True)
class SpectralSummary:
    lambda1: float
    lambda2: float
    lambda_n: float
    K: int
    Lambda: float
    Lambda1: float
    Lambda2: float
    Lambda3: float
    energy: float
    positive_tail: tuple  # (sum, sum of squares, sum of cubes) over i = 2..K
    avg_degree: float
    max_degree: int

    def check_invariants(self, tol: float = 1e-8) -> None:
        scale = max(1.0, float(self.max_degree) ** 3)
        if self.Lambda > self.max_degree**3 + tol * scale:
            raise InvariantError(f"Lambda = {self.Lambda} exceeds Delta^3 = {self.max_degree ** 3}")
        slack = tol * max(1.0, self.max_degree)
        if not (self.avg_degree - slack <= self.lambda1 <= self.max_degree + slack):
            raise InvariantError(
                f"lambda1 = {self.lambda1} outside [d, Delta] = [{self.avg_degree}, {self.max_degree}]"
            )

    def to_json(self) -> dict:
        out = {k: getattr(self, k) for k in self.__dataclass_fields__}
        out["positive_tail"] = list(self.positive_tail)
        return out


def positive_count(eigenvalues: np.ndarray) -> int:
    """K: number of eigenvalues above 1e-9 * lambda1 (exact zeros never count)."""
    lam1 = float(eigenvalues[0])
    if lam1 <= 0:
        return 0
    return int(np.sum(eigenvalues > POSITIVE_RTOL * lam1))


def spectral_summary(spec: Spectrum, graph: Graph) -> SpectralSummary:
    lam = np.asarray(spec.eigenvalues, dtype=np.float64)
    if len(lam) != graph.n:
        raise GuardError("spectrum and graph sizes differ")
    K = positive_count(lam)
    tail = lam[1:K] if K > 1 else lam[:0]
    neg = lam[K:]
    return SpectralSummary(
        lambda1=float(lam[0]),
        lambda2=float(lam[1]) if len(lam) > 1 else float("nan"),
        lambda_n=float(lam[-1]),
        K=K,
        Lambda=float(-np.sum(lam[1:] ** 3)),
        Lambda1=float(np.sum(np.abs(neg))),
        Lambda2=float(np.sum(neg**2)),
        Lambda3=float(np.sum(np.abs(neg) ** 3)),
        energy=float(np.sum(np.abs(lam))),
        positive_tail=(float(tail.sum()), float(np.sum(tail**2)), float(np.sum(tail**3))),
        avg_degree=float(graph.avg_degree),
        max_degree=graph.max_degree,
    )


def triangle_hom_count(graph: Graph) -> int:
    """T = 6 x (number of triangles), from row intersections."""
    indptr, indices = graph.csr
    return kernels.triangle_hom_count(graph.packed_rows, indptr, indices)


def _relative(a: float, b: float) -> float:
    return abs(a - b) / max(1.0, abs(b))


def check_lambda_T_identity(graph: Graph, spec: Optional[Spectrum] = None, rtol: float = 1e-6) -> dict:
    """Compare the spectral Lambda with d^3 - T on a regular graph."""
    if not graph.is_regular:
        raise GuardError("Lambda = d^3 - T needs a regular graph")
    spec = spec or eigendecompose(graph)
    d = int(graph.degrees[0])
    T = triangle_hom_count(graph)
    spectral = float(-np.sum(spec.eigenvalues[1:] ** 3))
    combinatorial = d**3 - T
    rel = _relative(spectral, combinatorial)
    return {
        "Lambda": spectral,
        "d3_minus_T": combinatorial,
        "T": T,
        "relative_difference": rel,
        "passed": rel <= rtol,
    }


def check_trace_cube_identity(graph: Graph, spec: Optional[Spectrum] = None, rtol: float = 1e-6) -> dict:
    """Lambda = lambda1^3 - tr(A^3) with tr(A^3) = T (any graph)."""
    spec = spec or eigendecompose(graph)
    lam = spec.eigenvalues
    T = triangle_hom_count(graph)
    spectral = float(-np.sum(lam[1:] ** 3))
    other = float(lam[0] ** 3 - T)
    rel = abs(spectral - other) / max(1.0, abs(other), float(lam[0]) ** 3)
    return {"Lambda": spectral, "lambda1_cubed_minus_T": other, "relative_difference": rel, "passed": rel <= rtol}


def check_product_bound(graph: Graph, spec: Optional[Spectrum] = None, tol: float = 1e-9) -> dict:
    """(1 + lambda2) |lambda_n| >= d / 4 for non-complete d-regular graphs with d <= n/2."""
    if not graph.is_regular:
        raise GuardError("product bound needs a regular graph")
    d = int(graph.degrees[0])
    if 2 * d > graph.n:
        raise GuardError(f"product bound needs d <= n/2, got d={d}, n={graph.n}")
    if d >= 1 and d == graph.n - 1:
        # only K2 gets here; the argument needs two non-adjacent vertices (lambda2 >= 0)
        raise GuardError("product bound needs a non-complete graph")
    spec = spec or eigendecompose(graph)
    lam2 = float(spec.eigenvalues[1]) if graph.n > 1 else 0.0
    lhs = (1.0 + lam2) * abs(float(spec.eigenvalues[-1]))
    rhs = d / 4
    return {"lhs": lhs, "rhs": rhs, "lambda2": lam2, "lambda_n": float(spec.eigenvalues[-1]),
            "passed": lhs >= rhs - tol * max(1.0, d)}


# strongly regular parameters ---------------------------------------------------


@dataclass(frozen=True)
class SrgParams:
    n: int
    d: int
    r: int
    s: int
    family: str = ""
    extra: dict = field(default_factory=dict, compare=False)

    @property
    def discriminant(self) -> int:
        return (self.r - self.s) ** 2 + 4 * (self.d - self.s)

    @property
    def lambda2(self) -> float:
        return srg_lambda2(self)[0]

    @property
    def lambda_n(self) -> float:
        return srg_lambda2(self)[1]

    @property
    def multiplicities(self) -> tuple:
        """(multiplicity of lambda2, multiplicity of lambda_n) as reals."""
        root = math.sqrt(self.discriminant)
        skew = (2 * self.d + (self.n - 1) * (self.r - self.s)) / root
        return ((self.n - 1 - skew) / 2, (self.n - 1 + skew) / 2)

    def feasibility(self) -> dict:
        """Diagnostics only; a failed check is reported, never raised."""
        flags = []
        counting = self.d * (self.d - self.r - 1) == (self.n - self.d - 1) * self.s
        if not counting:
            flags.append("d(d-r-1) != (n-d-1)s")
        if self.d == self.n - 1:
            flags.append("complete graph: no non-adjacent pairs, s is vacuous")
        if self.d == 0:
            flags.append("edgeless graph")
        mult = None
        if self.discriminant > 0:
            mult = self.multiplicities
            for value in mult:
                if abs(value - round(value)) > 1e-9:
                    flags.append(f"non-integral multiplicity {value:g}")
                elif round(value) <= 0:
                    flags.append(f"non-positive multiplicity {value:g}")
        else:
            flags.append("zero discriminant")
        return {
            "counting_identity": counting,
            "multiplicities": mult,
            "flags": flags,
            "feasible": not flags,
        }


def srg_lambda2(params: SrgParams) -> tuple:
    """(lambda2, lambda_n) = ((r-s) +- sqrt((r-s)^2 + 4(d-s))) / 2."""
    disc = params.discriminant
    if disc < 0:
        raise GuardError(f"negative discriminant {disc} for {params}")
    root = math.sqrt(disc)
    return ((params.r - params.s + root) / 2, (params.r - params.s - root) / 2)


def metz_params(q: int) -> SrgParams:
    """Parameters of the elliptic-quadric graph Q(q)."""
    if q < 2:
        raise GuardError(f"Q(q) needs q >= 2, got {q}")
    return SrgParams(
        n=q * q * (q * q - 1) // 2,
        d=(q - 1) * (q * q + 1),
        r=(q - 1) * (q + 2),
        s=2 * q * (q - 1),
        family=f"Q({q})",
    )


def _is_prime(p: int) -> bool:
    return p >= 2 and all(p % k for k in range(2, int(p**0.5) + 1))


def dhjp_params(p: int, m: int) -> SrgParams:
    """Parameters of the partial-difference-set graph D(p, m)."""
    if not (_is_prime(p) and p % 2 == 1):
        raise GuardError(f"D(p, m) needs an odd prime p, got {p}")
    if m < 2:
        raise GuardError(f"D(p, m) needs m >= 2, got {m}")
    base = p ** (2 * m - 1) - p**m + p ** (m - 1)
    return SrgParams(
        n=p ** (3 * m),
        d=base * (p**m - 1),
        r=p**m - p ** (m - 1) + base * (p ** (m - 1) - 2),
        s=base * (p ** (m - 1) - 1),
        family=f"D({p},{m})",
        extra={"lambda2_closed_form": p**m - p ** (m - 1)},
    )
