"""Explicit feasible matrices for the semidefinite relaxation and the bounds they certify.

For a PSD matrix X, disc(X) = <X, A - (d/n) J>. Scaling X by its largest
diagonal entry keeps it feasible, so every certificate reports
``bound = disc(X) / max(1, maxDiag)`` as a lower bound on pdisc(G).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import GuardError, InvariantError
from .graph import Graph
from .io import pack_spectrum_vectors
from .spectral import Spectrum, SpectralSummary, spectral_summary

CERT_TAGS = ("projector", "cube", "square", "energy", "lambdaCase", "denseXZ", "sandwichYZ", "custom")
PSD_FULL_LIMIT = 2000
PSD_RTOL = 1e-8
DISC_ROUTE_RTOL = 1e-6
MAX_DENSE_N = 2000


@dataclass(frozen=True, eq=False)
class EigenCombination:
    """X = sum_i alpha_i v_i v_i^T over the eigenvectors of a spectrum."""

    coefficients: np.ndarray
    spectrum: Spectrum

    def __post_init__(self):
        alpha = np.asarray(self.coefficients, dtype=np.float64)
        if alpha.shape != (self.spectrum.n,):
            raise GuardError(f"need {self.spectrum.n} coefficients, got {alpha.shape}")
        object.__setattr__(self, "coefficients", alpha)

    def explicit(self) -> np.ndarray:
        v = self.spectrum.eigenvectors
        return (v * self.coefficients) @ v.T

    def diagonal(self) -> np.ndarray:
        v = self.spectrum.eigenvectors
        return (v * v) @ self.coefficients

    def inner(self, other: "EigenCombination") -> float:
        """<X, Y> for two combinations over the same basis."""
        return float(self.coefficients @ other.coefficients)


@dataclass(frozen=True, eq=False)
class Certificate:
    tag: str
    disc_value: float
    max_diag: float
    min_eig: float
    bound: float
    matrix: Optional[np.ndarray] = None
    combination: Optional[EigenCombination] = None
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.tag not in CERT_TAGS:
            raise ValueError(f"unknown certificate tag {self.tag!r}")

    def explicit(self) -> np.ndarray:
        if self.matrix is not None:
            return self.matrix
        if self.combination is not None:
            return self.combination.explicit()
        raise GuardError(f"certificate {self.tag} carries no matrix")

    def check_invariants(self) -> None:
        scale = 1.0 + float(self.diagnostics.get("norm_estimate", 0.0))
        if self.min_eig < -PSD_RTOL * scale:
            raise InvariantError(f"{self.tag} certificate is not PSD: min eigenvalue {self.min_eig:.3e}")
        expected = self.disc_value / max(1.0, self.max_diag)
        if not math.isclose(self.bound, expected, rel_tol=1e-12, abs_tol=1e-12):
            raise InvariantError(f"{self.tag} bound {self.bound} != disc / max(1, maxDiag) = {expected}")

    def to_json(self) -> dict:
        return {
            "tag": self.tag,
            "bound": self.bound,
            "discValue": self.disc_value,
            "maxDiag": self.max_diag,
            "minEig": self.min_eig,
            "diagnostics": _plain(self.diagnostics),
        }

    def matrix_dump(self) -> bytes:
        return pack_spectrum_vectors(self.explicit())


def _plain(obj):
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


# disc(X) -------------------------------------------------------------------------


def _disc_explicit(graph: Graph, X: np.ndarray) -> float:
    d = float(graph.avg_degree)
    n = graph.n
    return float(np.sum(X[graph.adjacency])) - d / n * float(X.sum())


def disc_matrix(graph: Graph, X) -> float:
    """<X, A - (d/n) J> for an explicit matrix or an eigen-combination.

    Eigen-combinations are evaluated twice: as sum alpha_i (lambda_i - d <v_i, e>^2)
    and by expanding the matrix; the two must agree to 1e-6 relative.
    """
    if isinstance(X, EigenCombination):
        spec = X.spectrum
        if spec.n != graph.n:
            raise GuardError(f"combination has dimension {spec.n}, graph has n={graph.n}")
        d = float(graph.avg_degree)
        proj = spec.eigenvectors.T @ spec.unit
        alpha = X.coefficients
        terms = alpha * (spec.eigenvalues - d * proj**2)
        spectral_route = float(terms.sum())
        explicit_route = _disc_explicit(graph, X.explicit())
        scale = 1.0 + float(np.sum(np.abs(alpha) * (np.abs(spec.eigenvalues) + d)))
        if abs(spectral_route - explicit_route) > DISC_ROUTE_RTOL * scale:
            raise InvariantError(
                f"disc routes disagree: spectral {spectral_route!r} vs explicit {explicit_route!r}"
            )
        return spectral_route
    X = np.asarray(X, dtype=np.float64)
    if X.shape != (graph.n, graph.n):
        raise GuardError(f"matrix has shape {X.shape}, graph has n={graph.n}")
    return _disc_explicit(graph, X)


# PSD checks ----------------------------------------------------------------------


def psd_check(X: np.ndarray, seed: int = 0) -> tuple:
    """(min eigenvalue, spectral-norm estimate, method).

    Full ``numpy.linalg.eigvalsh`` up to n = 2000; beyond that the minimum of
    20 random Rayleigh quotients (a smoke check, not a proof).
    """
    X = np.asarray(X, dtype=np.float64)
    n = X.shape[0]
    if n == 0:
        return 0.0, 0.0, "empty"
    if n <= PSD_FULL_LIMIT:
        w = np.linalg.eigvalsh(X)
        return float(w[0]), float(np.max(np.abs(w))), "eigvalsh"
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((n, 20))
    g /= np.linalg.norm(g, axis=0)
    quotients = np.einsum("ij,ij->j", g, X @ g)
    return float(quotients.min()), float(np.linalg.norm(X)), "rayleigh20"


def is_psd(X: np.ndarray) -> bool:
    lo, norm, _ = psd_check(X)
    return lo >= -PSD_RTOL * (1.0 + norm)


def random_psd(n: int, rng: np.random.Generator, rank: Optional[int] = None) -> np.ndarray:
    rank = rank or n
    g = rng.standard_normal((n, rank))
    return g @ g.T


def hadamard_min_eigs(pairs: int = 50, max_n: int = 60, seed: int = 0) -> np.ndarray:
    """Min eigenvalue of P o Q for random PSD pairs (Schur product closure)."""
    rng = np.random.default_rng(seed)
    out = np.empty(pairs)
    for i in range(pairs):
        n = int(rng.integers(2, max_n + 1))
        P = random_psd(n, rng, rank=int(rng.integers(1, n + 1)))
        Q = random_psd(n, rng, rank=int(rng.integers(1, n + 1)))
        H = P * Q
        out[i] = np.linalg.eigvalsh(H)[0] / max(1.0, np.abs(H).max())
    return out


def _certificate(tag, graph, X, diagnostics=None) -> Certificate:
    """Certificate from an explicit matrix or combination; PSD checked independently."""
    explicit = X.explicit() if isinstance(X, EigenCombination) else np.asarray(X, dtype=np.float64)
    value = disc_matrix(graph, X)
    diag = X.diagonal() if isinstance(X, EigenCombination) else np.diagonal(explicit)
    max_diag = float(diag.max()) if diag.size else 0.0
    lo, norm, method = psd_check(explicit)
    info = dict(diagnostics or {})
    info.update(norm_estimate=norm, psd_method=method)
    return Certificate(
        tag=tag,
        disc_value=value,
        max_diag=max_diag,
        min_eig=lo,
        bound=value / max(1.0, max_diag),
        matrix=None if isinstance(X, EigenCombination) else explicit,
        combination=X if isinstance(X, EigenCombination) else None,
        diagnostics=info,
    )


# eigenvalue certificates -----------------------------------------------------------


def cert_projector(graph: Graph, spec: Spectrum, summary: Optional[SpectralSummary] = None) -> Certificate:
    """X = sum_{i <= K} v_i v_i^T;  certifies pdisc >= sum_{i=2..K} lambda_i."""
    summary = summary or spectral_summary(spec, graph)
    alpha = np.zeros(spec.n)
    alpha[: summary.K] = 1.0
    cert = _certificate(
        "projector", graph, EigenCombination(alpha, spec), {"K": summary.K, "target": summary.positive_tail[0]}
    )
    return cert


def cert_cube(graph: Graph, spec: Spectrum, summary: Optional[SpectralSummary] = None) -> Certificate:
    """X = (1/Delta) sum_{i <= K} lambda_i^2 v_i v_i^T;  certifies (1/Delta) sum_{i=2..K} lambda_i^3."""
    summary = summary or spectral_summary(spec, graph)
    delta = graph.max_degree
    alpha = np.zeros(spec.n)
    if delta >= 1:
        alpha[: summary.K] = spec.eigenvalues[: summary.K] ** 2 / delta
    target = summary.positive_tail[2] / delta if delta else 0.0
    return _certificate("cube", graph, EigenCombination(alpha, spec), {"K": summary.K, "target": target})


def cert_square_value(spec: Spectrum, max_degree: int) -> float:
    """(1/sqrt(Delta)) sum_{i=2..K} lambda_i^2."""
    if max_degree < 1:
        return 0.0
    lam = spec.eigenvalues
    K = int(np.sum(lam > 1e-9 * lam[0])) if lam[0] > 0 else 0
    return float(np.sum(lam[1:K] ** 2)) / math.sqrt(max_degree)


def cert_energy_value(spec: Spectrum) -> float:
    """E(G)/2 - lambda1."""
    lam = spec.eigenvalues
    return float(np.sum(np.abs(lam))) / 2 - float(lam[0])


def lambda_case_report(graph: Graph, summary: SpectralSummary) -> dict:
    """Walk the small-Lambda case analysis with the graph's actual numbers."""
    n = graph.n
    d = float(graph.avg_degree)
    delta = graph.max_degree
    hyp = delta <= 1.1 * d and d <= n / 2 and d > 0
    s = summary
    square = s.positive_tail[1] / math.sqrt(delta) if delta else 0.0
    cube = s.positive_tail[2] / delta if delta else 0.0
    projector = s.positive_tail[0]
    regime = "Lambda small" if s.Lambda <= d**1.5 * n / 16 else "Lambda large"
    report = {
        "hypotheses_met": hyp,
        "regime": regime,
        "Lambda": s.Lambda,
        "Lambda1": s.Lambda1,
        "Lambda2": s.Lambda2,
        "Lambda3": s.Lambda3,
        "Lambda2_le_dn_over_4": s.Lambda2 <= d * n / 4,
        "Lambda_le_half_Lambda3": s.Lambda <= s.Lambda3 / 2,
        "square_bound": square,
        "cube_bound": cube,
        "projector_bound": projector,
    }
    if not hyp:
        report["status"] = "hypotheses unmet"
    if report["Lambda2_le_dn_over_4"]:
        report.update(branch="square", implied=f"sum_{{i=2..K}} lambda_i^2 >= dn/4", best_bound=square)
    elif report["Lambda_le_half_Lambda3"]:
        report.update(branch="cube", implied="pdisc >= Lambda3 / (2 Delta)",
                      route_value=s.Lambda3 / (2 * delta) if delta else 0.0, best_bound=cube)
    else:
        lower = s.Lambda2**2 / (2 * s.Lambda) if s.Lambda > 0 else math.inf
        top_sum = s.lambda1 + s.positive_tail[0]
        report.update(
            branch="sum",
            implied="sum_{i=1..K} lambda_i >= Lambda2^2 / (2 Lambda)",
            sum_top_K=top_sum,
            route_value=lower,
            route_holds=top_sum >= lower * (1 - 1e-9),
            best_bound=projector,
        )
    report["best_overall"] = max(square, cube, projector)
    return report


# dense-regime certificate ------------------------------------------------------------


@dataclass(frozen=True)
class DenseCertDiagnostics:
    t: float
    w_norm: float
    w_bound: float
    YA_frobsq: float
    YA_bound: float
    YA_inner: float
    Y_maxdiag: float
    E_maxdiag: float
    discE0: float
    discE1: float
    discZY: float
    discZY_claim: float
    case_threshold: float
    caseTaken: str
    in_regime: bool
    hypotheses_met: bool
    v1_nonnegative: bool
    notes: tuple = ()

    def check_invariants(self, tol: float = 1e-8) -> None:
        if self.E_maxdiag > 1 + tol:
            raise InvariantError(f"E has diagonal entry {self.E_maxdiag} > 1")
        if abs(self.discZY - self.discZY_claim) > 1e-6 * max(1.0, abs(self.discZY)):
            raise InvariantError(f"disc(Z o Y) = {self.discZY} but the closed form gives {self.discZY_claim}")

    def to_json(self) -> dict:
        return _plain({k: getattr(self, k) for k in self.__dataclass_fields__})


def _dense_hypotheses(graph: Graph, epsilon: float) -> list:
    d = float(graph.avg_degree)
    problems = []
    if graph.max_degree > (1 + epsilon / 2) * d:
        problems.append(f"Delta={graph.max_degree} > (1 + eps/2) d = {(1 + epsilon / 2) * d:g}")
    if d > (0.5 - epsilon) * graph.n:
        problems.append(f"d={d:g} > (1/2 - eps) n = {(0.5 - epsilon) * graph.n:g}")
    return problems


def cert_dense(graph: Graph, spec: Spectrum, epsilon: float = 0.1, strict: bool = True):
    """X = (Z + E) o Y with t = sqrt(d).

    Y = (A^2 - lambda1^2 v1 v1^T) / Delta, Z = I - A/t and
    E = sum_{lambda_i >= t} (lambda_i / t) v_i v_i^T. With ``strict=False`` the
    construction also runs when the degree hypotheses fail; the diagnostics
    say so instead of raising.
    """
    if not (0 < epsilon < 0.5):
        raise GuardError(f"epsilon must lie in (0, 1/2), got {epsilon}")
    n = graph.n
    if n > MAX_DENSE_N:
        raise GuardError(f"dense certificate builds n x n matrices; n={n} exceeds {MAX_DENSE_N}")
    if graph.m == 0:
        raise GuardError("dense certificate needs at least one edge")
    problems = _dense_hypotheses(graph, epsilon)
    if problems and strict:
        raise GuardError("dense certificate hypotheses unmet: " + "; ".join(problems))

    A = graph.adjacency_matrix()
    d = float(graph.avg_degree)
    delta = float(graph.max_degree)
    lam = spec.eigenvalues
    V = spec.eigenvectors
    v1 = V[:, 0]
    t = math.sqrt(d)
    Lambda = float(-np.sum(lam[1:] ** 3))

    Y = (A @ A - lam[0] ** 2 * np.outer(v1, v1)) / delta
    Z = np.eye(n) - A / t
    top = lam >= t
    E0 = (lam[0] / t) * np.outer(v1, v1) if top[0] else np.zeros((n, n))
    mask1 = top.copy()
    mask1[0] = False
    E1 = (V[:, mask1] * (lam[mask1] / t)) @ V[:, mask1].T
    E = E0 + E1
    X = (Z + E) * Y

    e = spec.unit
    w = v1 - float(v1 @ e) * e
    YA = Y * A
    disc_zy = disc_matrix(graph, Z * Y)
    claim = -d / n * float(np.trace(Y)) - (1 / t) * (1 - d / n) * float(np.sum(Y * A))
    threshold = epsilon * Lambda / (16 * d**1.5)
    disc_e1 = disc_matrix(graph, E1 * Y)
    in_regime = Lambda >= d**1.75 * n
    notes = list(problems)
    if not in_regime:
        notes.append("sparse-regime graph, dense certificate weak")
    diag = DenseCertDiagnostics(
        t=t,
        w_norm=float(np.linalg.norm(w)),
        w_bound=math.sqrt(2 * n) / d**0.875,
        YA_frobsq=float(np.sum(YA * YA)),
        YA_bound=2 * Lambda / delta,
        YA_inner=float(np.sum(YA)),
        Y_maxdiag=float(np.diagonal(Y).max()),
        E_maxdiag=float(np.diagonal(E).max()),
        discE0=disc_matrix(graph, E0 * Y),
        discE1=disc_e1,
        discZY=disc_zy,
        discZY_claim=claim,
        case_threshold=threshold,
        caseTaken="case1" if abs(disc_e1) <= threshold else "case2",
        in_regime=in_regime,
        hypotheses_met=not problems,
        v1_nonnegative=bool(np.all(v1 >= -1e-12)),
        notes=tuple(notes),
    )
    diag.check_invariants()
    cert = _certificate("denseXZ", graph, X, {"Lambda": Lambda, "case": diag.caseTaken, "notes": list(notes)})
    cert.check_invariants()
    return cert, diag


# sandwich certificate --------------------------------------------------------------


def cert_sandwich(graph: Graph, spec: Spectrum, epsilon: float = 0.1):
    """X = Y o Z with t = lambda2, Z = I - A/t + ((d - t)/(t n)) J, Y = (A^2 - (d^2/n) J)/d."""
    if not graph.is_regular:
        raise GuardError("sandwich certificate needs a regular graph")
    n = graph.n
    if n > MAX_DENSE_N:
        raise GuardError(f"sandwich certificate builds n x n matrices; n={n} exceeds {MAX_DENSE_N}")
    d = float(graph.degrees[0])
    t = float(spec.eigenvalues[1]) if n > 1 else 0.0
    if t <= 1e-9 * max(1.0, d):
        raise GuardError(f"sandwich certificate needs lambda2 > 0, got {t:.3g}")
    if d > (0.5 - epsilon) * n:
        raise GuardError(f"sandwich certificate needs d <= (1/2 - eps) n, got d={d:g}, n={n}")
    A = graph.adjacency_matrix()
    Lambda = float(-np.sum(spec.eigenvalues[1:] ** 3))
    Y = (A @ A - d * d / n) / d
    Z = np.eye(n) - A / t + (d - t) / (t * n)
    X = Y * Z
    ya = float(np.sum(Y * A))
    coef = (n - 2 * d + t) / (n * t)
    direct = disc_matrix(graph, X)
    trace_y = float(np.trace(Y))
    # tr(Y) = n - d, so the -(d/n) tr(Y) term is -d + d^2/n
    closed = -d / n * trace_y - coef * ya
    stated = -d - coef * ya
    report = {
        "t": t,
        "Lambda": Lambda,
        "YA": ya,
        "YA_expected": -Lambda / d,
        "trace_Y": trace_y,
        "disc_direct": direct,
        "disc_closed_form": closed,
        "disc_stated_form": stated,
        "stated_form_gap": direct - stated,
        "explicit_value": epsilon * Lambda / (8 * d * t),
    }
    scale = max(1.0, abs(direct), abs(coef * ya), d)
    if abs(direct - closed) > DISC_ROUTE_RTOL * scale:
        raise InvariantError(f"disc(Y o Z) = {direct} disagrees with closed form {closed}")
    if abs(ya + Lambda / d) > DISC_ROUTE_RTOL * max(1.0, abs(ya)):
        raise InvariantError(f"<Y, A> = {ya} but -Lambda/d = {-Lambda / d}")
    cert = _certificate("sandwichYZ", graph, X, {"t": t})
    cert.check_invariants()
    return cert, report


# upper bounds ----------------------------------------------------------------------


def upper_bounds(graph: Graph, spec: Spectrum) -> dict:
    """pdisc <= lambda2 n and disc+ <= (lambda2/2) n + d, both for regular graphs.

    ``pdisc_upper`` clips at zero: X = 0 is feasible, so pdisc >= 0 always.
    """
    n = graph.n
    lam2 = float(spec.eigenvalues[1]) if n > 1 else 0.0
    d = float(graph.avg_degree)
    return {
        "applicable": graph.is_regular,
        "lambda2": lam2,
        "lambda2_n": lam2 * n,
        "pdisc_upper": max(lam2, 0.0) * n,
        "disc_plus_upper": lam2 * n / 2 + d,
    }


def certify_all(graph: Graph, spec: Spectrum, epsilon: float = 0.1, dense: bool = True) -> dict:
    """Every certificate that applies to ``graph``; inapplicable ones are reported as skipped."""
    summary = spectral_summary(spec, graph)
    out = {
        "summary": summary.to_json(),
        "projector": cert_projector(graph, spec, summary).to_json(),
        "cube": cert_cube(graph, spec, summary).to_json(),
        "square": cert_square_value(spec, graph.max_degree),
        "energy": cert_energy_value(spec),
        "lambdaCase": lambda_case_report(graph, summary),
        "upper": upper_bounds(graph, spec),
    }
    if dense:
        try:
            cert, diag = cert_dense(graph, spec, epsilon, strict=False)
            out["denseXZ"] = {**cert.to_json(), "dense": diag.to_json()}
        except GuardError as exc:
            out["denseXZ"] = {"skipped": str(exc)}
        try:
            cert, report = cert_sandwich(graph, spec, epsilon)
            out["sandwichYZ"] = {**cert.to_json(), "sandwich": report}
        except GuardError as exc:
            out["sandwichYZ"] = {"skipped": str(exc)}
    return _plain(out)
