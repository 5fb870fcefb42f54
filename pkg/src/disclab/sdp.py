"""Low-rank projected gradient ascent for pdisc(G) = max <X, A - (d/n) J>, X PSD, X_ii <= 1.

X = V V^T with rows of V in the unit ball, so every iterate is feasible and its
objective is a valid lower bound on pdisc.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import GuardError, SoundnessError
from .exact import CutResult
from .graph import Graph
from .io import pack_factor
from .rounding import factor_ensemble, hyperplane_round, pm1_to_subset
from .spectral import Spectrum

ROW_TOL = 1e-10
MONOTONE_SLACK = 1e-12
WINDOW = 25


def default_rank(n: int) -> int:
    return math.ceil(math.sqrt(2 * n)) + 1


@dataclass(frozen=True)
class SdpConfig:
    k: Optional[int] = None
    max_iters: int = 5000
    tol: float = 1e-9
    seed: int = 0


@dataclass(frozen=True, eq=False)
class FactorState:
    V: np.ndarray
    k: int
    objective: float
    iterations: int
    converged: bool
    grad_norm_final: float
    history: np.ndarray = field(repr=False)  # objective after each accepted iterate
    max_row_norms: np.ndarray = field(repr=False)
    rejected_steps: int = 0

    def recompute_objective(self, graph: Graph) -> float:
        return objective(graph, self.V)

    def to_json(self) -> dict:
        return {
            "objective": self.objective,
            "iterations": self.iterations,
            "converged": self.converged,
            "k": self.k,
            "gradNormFinal": self.grad_norm_final,
            "rejectedSteps": self.rejected_steps,
        }

    def dump(self) -> bytes:
        return pack_factor(self.V)


class _Operator:
    """B = A - (d/n) J applied to a block, without forming J."""

    def __init__(self, graph: Graph):
        self.A = graph.adjacency_matrix()
        self.c = float(graph.avg_degree) / graph.n

    def __call__(self, V):
        return self.A @ V - self.c * np.outer(np.ones(V.shape[0]), V.sum(axis=0))


def objective(graph: Graph, V: np.ndarray) -> float:
    B = _Operator(graph)
    return float(np.sum(V * B(V)))


def _project(V):
    norms = np.linalg.norm(V, axis=1)
    over = norms > 1.0
    if over.any():
        V[over] /= norms[over, None]
    return V


def lambda1_estimate(graph: Graph, iters: int = 200) -> float:
    """Power iteration on A + Delta I (shifted so the top eigenvalue dominates)."""
    A = graph.adjacency_matrix()
    shift = float(graph.max_degree)
    x = np.ones(graph.n) / math.sqrt(graph.n)
    x = x + 1e-3 * np.sin(np.arange(graph.n))  # break symmetry with a fixed vector
    x /= np.linalg.norm(x)
    est = 0.0
    for _ in range(iters):
        y = A @ x + shift * x
        norm = np.linalg.norm(y)
        if norm == 0:
            return 0.0
        est = float(x @ y) - shift
        x = y / norm
    return max(est, 0.0)


def sdp_solve(graph: Graph, config: SdpConfig = SdpConfig()) -> FactorState:
    n = graph.n
    k = config.k or default_rank(n)
    if k < 2:
        raise GuardError(f"rank k must be >= 2, got {k}")
    if config.max_iters < 1:
        raise GuardError("max_iters must be >= 1")
    rng = np.random.default_rng(config.seed)
    V = rng.standard_normal((n, k))
    V *= 0.5 / np.linalg.norm(V, axis=1)[:, None]
    B = _Operator(graph)
    d = float(graph.avg_degree)
    step = 1.0 / (2 * lambda1_estimate(graph) + 2 * d) if graph.m else 1.0

    BV = B(V)
    obj = float(np.sum(V * BV))
    history = [obj]
    row_max = [float(np.linalg.norm(V, axis=1).max())]
    rejected = 0
    converged = False
    it = 0
    while it < config.max_iters:
        it += 1
        cand = _project(V + step * 2 * BV)
        cand_BV = B(cand)
        cand_obj = float(np.sum(cand * cand_BV))
        if cand_obj < obj - MONOTONE_SLACK * max(1.0, abs(obj)):
            rejected += 1
            step /= 2
            if step < 1e-300:
                break
            continue
        V, BV, obj = cand, cand_BV, cand_obj
        history.append(obj)
        row_max.append(float(np.linalg.norm(V, axis=1).max()))
        if len(history) > WINDOW:
            gain = history[-1] - history[-1 - WINDOW]
            if gain < config.tol * max(1.0, abs(obj)):
                converged = True
                break

    grad_map = (_project(V + step * 2 * BV) - V) / step if step > 0 else np.zeros_like(V)
    V.setflags(write=False)
    return FactorState(
        V=V,
        k=k,
        objective=obj,
        iterations=it,
        converged=converged,
        grad_norm_final=float(np.linalg.norm(grad_map)),
        history=np.array(history),
        max_row_norms=np.array(row_max),
        rejected_steps=rejected,
    )


def sdp_round(graph: Graph, state: FactorState, trials: int, seed: int) -> CutResult:
    """Hyperplane rounding of the normalised rows, then the better of U and U^c."""
    ens = factor_ensemble(state.V)
    best = hyperplane_round(ens, graph, trials, seed)
    x = -np.ones(graph.n, dtype=np.int64)
    x[list(best.subset)] = 1
    split = pm1_to_subset(graph, x)
    return CutResult(split.subset, split.value, "discPlus", "sdp-hyperplane", seed=seed, trial=best.trial)


def dual_upper_bound(graph: Graph, state: FactorState) -> float:
    """Certified pdisc upper bound from the factor's multipliers.

    mu_i = max(0, <(BV)_i, v_i>); Diag(mu + s) - B is PSD once s covers its most
    negative eigenvalue, so sum(mu) + n s bounds every feasible <X, B>.
    """
    B = _Operator(graph)
    mu = np.maximum(0.0, np.sum(B(state.V) * state.V, axis=1))
    full = np.diag(mu) - (graph.adjacency_matrix() - B.c)
    shift = max(0.0, -float(np.linalg.eigvalsh(full)[0]))
    return float(mu.sum() + graph.n * shift)


def sdp_gap_report(graph: Graph, state: FactorState, spec: Spectrum, cert_best: Optional[float] = None) -> dict:
    """Objective against the best certificate and the lambda2 n upper bound."""
    from .certificates import cert_cube, cert_energy_value, cert_projector, cert_square_value

    if cert_best is None:
        cert_best = max(
            cert_projector(graph, spec).bound,
            cert_cube(graph, spec).bound,
            cert_square_value(spec, graph.max_degree),
            cert_energy_value(spec),
        )
    n = graph.n
    lam2 = float(spec.eigenvalues[1]) if n > 1 else 0.0
    upper = max(lam2, 0.0) * n if graph.is_regular else None
    report = {
        "objective": state.objective,
        "cert_best": cert_best,
        "upper_lambda2_n": upper,
        "regular": graph.is_regular,
        "sdp_ge_cert": state.objective >= cert_best - 1e-6 * max(1.0, abs(cert_best)),
        "converged": state.converged,
    }
    if n <= 2000:
        dual = dual_upper_bound(graph, state)
        report["dual_upper"] = dual
        report["duality_gap"] = dual - state.objective
        report["near_optimal"] = dual - state.objective <= 1e-3 * max(1.0, abs(dual))
    if upper is not None and state.objective > upper + 1e-6 * n:
        raise SoundnessError(f"SDP objective {state.objective} exceeds lambda2 n = {upper}")
    return report
