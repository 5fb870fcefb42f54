"""Regime sweeps and the ``verify`` check registry."""

from __future__ import annotations

import itertools
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from . import certificates as certs
from . import corpus, exact, pruning, rounding, sdp, spectral
from .errors import DiscLabError, GuardError, SoundnessError
from .genspec import parse_graph_spec
from .graph import from_edge_list, to_edge_list
from .io import fmt_float

SCHEMA_LINE = "# schema=1"
SWEEP_FIELDS = (
    "n", "d", "model", "seed",
    "lambda1", "lambda2", "lambdaN", "Lambda",
    "certProjector", "certCube", "certSquare", "certEnergy", "certDense", "certSandwich",
    "sdpObjective", "roundingBest", "upperLambda2n",
)
TIMING_FIELDS = ("msSpectrum", "msCertify", "msSdp", "msRound")
MAX_SWEEP_POINTS = 200
MAX_SWEEP_N = 1000


# sweep -----------------------------------------------------------------------------


@dataclass(frozen=True)
class SweepPoint:
    model: str
    n: int
    d: int
    seed: int
    spec: str


@dataclass(frozen=True)
class SweepOptions:
    epsilon: float = 0.1
    delta: float = rounding.DEFAULT_DELTA
    trials: int = 100
    sdp: bool = True
    sdp_max_iters: int = 5000
    with_timings: bool = False


def plan_random_regular(ns, ds, seeds) -> list:
    return [
        SweepPoint("randomRegular", n, d, s, f"rr:n={n},d={d},seed={s}")
        for n, d, s in itertools.product(ns, ds, seeds)
    ]


def plan_blowup(base: str, ks) -> list:
    G = parse_graph_spec(base)
    if not G.is_regular:
        raise GuardError(f"blow-up sweep needs a regular base graph, {base!r} is not")
    deg = int(G.degrees[0])
    return [SweepPoint(f"blowup:{base}", G.n * k, deg * k, 0, f"blowup:{base},k={k}") for k in ks]


def check_budget(points) -> None:
    """At most 200 eigendecompositions, each at n <= 1000."""
    big = [p.n for p in points if p.n > MAX_SWEEP_N]
    if len(points) > MAX_SWEEP_POINTS or big:
        cost = sum((p.n / 500) ** 3 for p in points)
        raise GuardError(
            f"sweep exceeds the desk budget: {len(points)} eigendecompositions "
            f"(limit {MAX_SWEEP_POINTS}), largest n={max(p.n for p in points)} (limit {MAX_SWEEP_N}); "
            f"estimated cost {cost:.1f} n=500-equivalents"
        )


def _ms(start):
    return (time.perf_counter() - start) * 1000


def run_point(point: SweepPoint, options: SweepOptions = SweepOptions()) -> dict:
    G = parse_graph_spec(point.spec)
    rec = {"n": point.n, "d": point.d, "model": point.model, "seed": point.seed}
    t0 = time.perf_counter()
    spec = spectral.eigendecompose(G)
    summary = spectral.spectral_summary(spec, G)
    rec["msSpectrum"] = _ms(t0)
    t0 = time.perf_counter()
    rec.update(
        lambda1=summary.lambda1,
        lambda2=summary.lambda2,
        lambdaN=summary.lambda_n,
        Lambda=summary.Lambda,
        certProjector=certs.cert_projector(G, spec, summary).bound,
        certCube=certs.cert_cube(G, spec, summary).bound,
        certSquare=certs.cert_square_value(spec, G.max_degree),
        certEnergy=certs.cert_energy_value(spec),
    )
    try:
        rec["certDense"] = certs.cert_dense(G, spec, options.epsilon, strict=False)[0].bound
    except GuardError:
        rec["certDense"] = None
    try:
        rec["certSandwich"] = certs.cert_sandwich(G, spec, options.epsilon)[0].bound
    except GuardError:
        rec["certSandwich"] = None
    upper = certs.upper_bounds(G, spec)
    rec["upperLambda2n"] = upper["pdisc_upper"] if upper["applicable"] else None
    rec["msCertify"] = _ms(t0)
    t0 = time.perf_counter()
    if options.sdp:
        state = sdp.sdp_solve(G, sdp.SdpConfig(max_iters=options.sdp_max_iters, seed=point.seed))
        rec["sdpObjective"] = state.objective
    else:
        rec["sdpObjective"] = None
    rec["msSdp"] = _ms(t0)
    t0 = time.perf_counter()
    ens = rounding.build_sparse_vectors(G, options.delta)
    rec["roundingBest"] = float(rounding.hyperplane_round(ens, G, options.trials, point.seed).value)
    rec["msRound"] = _ms(t0)
    _check_record(rec)
    return rec


def _check_record(rec: dict) -> None:
    upper = rec.get("upperLambda2n")
    if upper is None:
        return
    tol = 1e-6 * max(1.0, rec["n"])
    for key in ("certProjector", "certCube", "certDense", "certSandwich", "sdpObjective"):
        value = rec.get(key)
        if value is not None and value > upper + tol:
            raise SoundnessError(f"{key}={value} exceeds lambda2 n = {upper} at n={rec['n']} d={rec['d']}")


def _run_point_args(args):
    return run_point(*args)


def run_sweep(points, options: SweepOptions = SweepOptions(), threads: int = 1) -> list:
    check_budget(points)
    jobs = [(p, options) for p in points]
    if threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            records = list(pool.map(_run_point_args, jobs))
    else:
        records = [run_point(*job) for job in jobs]
    return sorted(records, key=lambda r: (r["n"], r["d"], r["seed"], r["model"]))


def sweep_csv(records, with_timings: bool = False) -> str:
    fields = SWEEP_FIELDS + (TIMING_FIELDS if with_timings else ())
    lines = [SCHEMA_LINE, ",".join(fields)]
    for rec in records:
        cells = []
        for key in fields:
            value = rec.get(key)
            cells.append(value if isinstance(value, str) else fmt_float(value))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


# verify ----------------------------------------------------------------------------


@dataclass
class Check:
    name: str
    module: str
    run: Callable[[], list]
    description: str = ""


@dataclass
class CheckOutcome:
    name: str
    module: str
    passed: bool
    failures: list = field(default_factory=list)
    seconds: float = 0.0


def _fail(graph, detail, **values):
    return {"graph": getattr(graph, "name", str(graph)), "detail": detail, **values}


def _check_graphs():
    out = []
    for G in corpus.named_corpus() + corpus.random_corpus(50) + corpus.regular_corpus(200):
        try:
            G.check_invariants()
            again = from_edge_list(to_edge_list(G))
            if not np.array_equal(again.adjacency, G.adjacency):
                out.append(_fail(G, "edge-list round trip changed the graph"))
        except DiscLabError as exc:
            out.append(_fail(G, str(exc)))
    return out


def _check_zero_sum():
    out = []
    rng = np.random.default_rng(1)
    for G in corpus.named_corpus() + corpus.random_corpus():
        for _ in range(10):
            U = np.flatnonzero(rng.random(G.n) < 0.5)
            rest = np.setdiff1d(np.arange(G.n), U)
            total = exact.disc_set(G, U) + exact.disc_pair(G, U, rest) + exact.disc_set(G, rest)
            if total != 0:
                out.append(_fail(G, "zero-sum identity", subset=U.tolist(), total=str(total)))
                break
    return out


def _check_regular_complement():
    out = []
    rng = np.random.default_rng(2)
    for G in corpus.named_corpus() + corpus.regular_corpus(60):
        if not G.is_regular:
            continue
        for _ in range(10):
            U = np.flatnonzero(rng.random(G.n) < 0.5)
            rest = np.setdiff1d(np.arange(G.n), U)
            a, b = exact.disc_set(G, U), exact.disc_set(G, rest)
            cross = exact.disc_pair(G, U, rest)
            if not (a == b == -cross / 2):
                out.append(_fail(G, "regular complement identity", subset=U.tolist()))
                break
    return out


def _check_sandwich():
    out = []
    for G in corpus.small_corpus(12):
        plus = exact.disc_plus_exact(G).value
        one = exact.disc1_plus_exact(G).value
        if not (plus <= one <= 4 * plus):
            out.append(_fail(G, "disc+ <= disc1+ <= 4 disc+", disc_plus=str(plus), disc1_plus=str(one)))
    return out


def _surplus_floor(G) -> Fraction:
    # disc- >= surplus/2 - d n / (8 (n - 1)) on regular graphs
    n = G.n
    d = int(G.degrees[0])
    return exact.surplus_exact(G).value / 2 - Fraction(d * n, 8 * (n - 1))


def _check_surplus_linkage():
    out = []
    for G in corpus.named_corpus() + corpus.regular_corpus(20):
        if not G.is_regular or G.n < 2 or G.n > 20:
            continue
        minus = exact.disc_minus_exact(G).value
        if minus < _surplus_floor(G):
            out.append(_fail(G, "disc- below surplus/2 - dn/(8(n-1))", disc_minus=str(minus)))
    return out


def _check_surplus_bisection():
    """Equipartition U: deficit(U, U^c) = 2 disc(U) - d n / (4 (n - 1))."""
    out = []
    rng = np.random.default_rng(3)
    for G in corpus.named_corpus() + corpus.regular_corpus(60):
        if not G.is_regular or G.n < 2 or G.n % 2:
            continue
        d = int(G.degrees[0])
        U = np.sort(rng.permutation(G.n)[: G.n // 2])
        deficit = Fraction(G.m - 2 * exact.cut_size(G, U), 2)
        expected = 2 * exact.disc_set(G, U) - Fraction(d * G.n, 4 * (G.n - 1))
        if deficit != expected:
            out.append(_fail(G, "bisection deficit identity", deficit=str(deficit), expected=str(expected)))
    return out


def _check_pruning():
    out = []
    for G in corpus.named_corpus() + corpus.random_corpus(50):
        report = pruning.prune_high_degree(G, Fraction(1, 2))
        X = list(report.high_set)
        rest = [v for v in range(G.n) if v not in set(X)]
        if report.f != exact.edges_within(G, X) + exact.edges_between(G, X, rest):
            out.append(_fail(G, "removed edges != e(X) + e(X, X^c)"))
    return out


def _spectral_graphs():
    return corpus.named_corpus() + corpus.regular_corpus(200)


def _check_spectra():
    out = []
    for G in _spectral_graphs():
        try:
            sp = spectral.eigendecompose(G)
            sp.check_invariants(G)
            spectral.spectral_summary(sp, G).check_invariants()
        except DiscLabError as exc:
            out.append(_fail(G, str(exc)))
    return out


def _check_lambda_t():
    out = []
    for G in _spectral_graphs():
        if not G.is_regular or G.m == 0:
            continue
        report = spectral.check_lambda_T_identity(G)
        if not report["passed"]:
            out.append(_fail(G, "Lambda != d^3 - T", **report))
    return out


def _check_trace_cube():
    out = []
    for G in corpus.named_corpus() + corpus.random_corpus(30):
        report = spectral.check_trace_cube_identity(G)
        if not report["passed"]:
            out.append(_fail(G, "Lambda != lambda1^3 - tr(A^3)", **report))
    return out


def _check_product_bound():
    out = []
    for G in _spectral_graphs():
        if not G.is_regular or G.m == 0 or 2 * int(G.degrees[0]) > G.n or int(G.degrees[0]) == G.n - 1:
            continue
        report = spectral.check_product_bound(G)
        if not report["passed"]:
            out.append(_fail(G, "(1 + lambda2)|lambda_n| < d/4", **report))
    return out


def _check_srg():
    from .graph import paley, petersen

    out = []
    for G, params in ((petersen(), spectral.SrgParams(10, 3, 0, 1)), (paley(13), spectral.SrgParams(13, 6, 2, 3))):
        lam = spectral.eigendecompose(G).eigenvalues
        l2, ln = spectral.srg_lambda2(params)
        if abs(lam[1] - l2) > 1e-8 or abs(lam[-1] - ln) > 1e-8:
            out.append(_fail(G, "SRG formula disagrees with the eigensolver", formula=(l2, ln)))
    return out


def _check_certificates():
    out = []
    for G in _spectral_graphs():
        if G.m == 0:
            continue
        sp = spectral.eigendecompose(G)
        produced = [certs.cert_projector(G, sp), certs.cert_cube(G, sp)]
        if G.is_regular and G.n <= 200:
            try:
                produced.append(certs.cert_sandwich(G, sp)[0])
            except GuardError:
                pass
        upper = certs.upper_bounds(G, sp)
        for cert in produced:
            try:
                cert.check_invariants()
            except DiscLabError as exc:
                out.append(_fail(G, str(exc), tag=cert.tag))
            if upper["applicable"] and cert.bound > upper["pdisc_upper"] + 1e-6 * max(1, G.n):
                out.append(_fail(G, "certificate above lambda2 n", tag=cert.tag, bound=cert.bound))
    return out


def _check_hadamard():
    worst = float(certs.hadamard_min_eigs().min())
    return [] if worst >= -1e-8 else [_fail("random PSD pairs", "Hadamard product not PSD", min_eig=worst)]


def _check_pm1():
    out = []
    for G in corpus.small_corpus(8):
        for bits in itertools.product((-1, 1), repeat=G.n):
            try:
                rounding.pm1_to_subset(G, np.array(bits))
            except DiscLabError as exc:
                out.append(_fail(G, str(exc), x=list(bits)))
                break
    return out


def _check_rounding_determinism():
    from .graph import gen_random_regular

    G = gen_random_regular(60, 6, seed=5)
    ens = rounding.build_sparse_vectors(G)
    a = rounding.hyperplane_round(ens, G, 30, seed=9)
    b = rounding.hyperplane_round(ens, G, 30, seed=9)
    return [] if a == b else [_fail(G, "hyperplane rounding is not reproducible")]


def _check_sdp():
    out = []
    for G in corpus.regular_corpus(40):
        state = sdp.sdp_solve(G, sdp.SdpConfig(max_iters=2000))
        if state.max_row_norms.max() > 1 + 1e-10:
            out.append(_fail(G, "infeasible iterate", max_row_norm=float(state.max_row_norms.max())))
        if np.any(np.diff(state.history) < -1e-12 * np.maximum(1.0, np.abs(state.history[1:]))):
            out.append(_fail(G, "objective decreased"))
        try:
            sdp.sdp_gap_report(G, state, spectral.eigendecompose(G), cert_best=0.0)
        except DiscLabError as exc:
            out.append(_fail(G, str(exc)))
    return out


CHECKS = [
    Check("graph.invariants", "graph-core", _check_graphs, "adjacency invariants and edge-list round trip"),
    Check("exact.zero-sum", "exact-oracle", _check_zero_sum, "disc(U) + disc(U,U^c) + disc(U^c) = 0"),
    Check("exact.regular-complement", "exact-oracle", _check_regular_complement),
    Check("exact.sandwich", "exact-oracle", _check_sandwich, "disc+ <= disc1+ <= 4 disc+"),
    Check("surplus.linkage", "rounding", _check_surplus_linkage, "disc- >= surplus/2 - dn/(8(n-1))"),
    Check("surplus.bisection", "rounding", _check_surplus_bisection, "deficit of an equipartition"),
    Check("graph.pruning", "graph-core", _check_pruning, "f = e(X) + e(X, X^c)"),
    Check("spectral.invariants", "spectral", _check_spectra, "orthonormality, residual, trace identities"),
    Check("spectral.lambda-T", "spectral", _check_lambda_t, "Lambda = d^3 - T"),
    Check("spectral.trace-cube", "spectral", _check_trace_cube, "Lambda = lambda1^3 - tr(A^3)"),
    Check("spectral.product-bound", "spectral", _check_product_bound, "(1 + lambda2)|lambda_n| >= d/4"),
    Check("spectral.srg", "spectral", _check_srg, "closed-form SRG eigenvalues"),
    Check("certificates.soundness", "certificates", _check_certificates, "PSD and below lambda2 n"),
    Check("certificates.hadamard", "certificates", _check_hadamard, "Schur product closure"),
    Check("rounding.pm1", "rounding", _check_pm1, "better side >= disc(x)/4"),
    Check("rounding.determinism", "rounding", _check_rounding_determinism),
    Check("sdp.soundness", "sdp", _check_sdp, "feasible, monotone, below lambda2 n"),
]


def select_checks(only: Optional[list] = None) -> list:
    if not only:
        return list(CHECKS)
    chosen = [c for c in CHECKS if any(tok in c.name or tok == c.module for tok in only)]
    if not chosen:
        raise GuardError(f"--only {only} matches no check; known: {[c.name for c in CHECKS]}")
    return chosen


def run_verify(only: Optional[list] = None) -> dict:
    outcomes = []
    for check in select_checks(only):
        start = time.perf_counter()
        try:
            failures = check.run()
        except DiscLabError as exc:
            failures = [{"graph": "", "detail": f"{type(exc).__name__}: {exc}"}]
        outcomes.append(
            CheckOutcome(check.name, check.module, not failures, failures, round(time.perf_counter() - start, 3))
        )
    return {
        "passed": all(o.passed for o in outcomes),
        "checks": [asdict(o) for o in outcomes],
    }
