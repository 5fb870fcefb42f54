import math

import numpy as np
import pytest

from disclab import kernels
from disclab.corpus import random_corpus, regular_corpus
from disclab.errors import ConvergenceError, GuardError
from disclab.graph import (
    complete,
    complete_bipartite,
    cycle,
    empty,
    gen_blowup,
    gen_random_regular,
    paley,
    path,
    petersen,
)
from disclab.spectral import (
    SrgParams,
    check_lambda_T_identity,
    check_product_bound,
    check_trace_cube_identity,
    dhjp_params,
    eigendecompose,
    metz_params,
    positive_count,
    spectral_summary,
    srg_lambda2,
    symmetric_eigh,
    triangle_hom_count,
)


def test_k4_spectrum():
    spec = eigendecompose(complete(4))
    assert np.allclose(spec.eigenvalues, [3, -1, -1, -1], atol=1e-10)
    spec.check_invariants(complete(4))


def test_petersen_spectrum():
    P = petersen()
    spec = eigendecompose(P)
    assert np.allclose(spec.eigenvalues, [3] + [1] * 5 + [-2] * 4, atol=1e-10)
    spec.check_invariants(P)


def test_c5_spectrum_circulant():
    spec = eigendecompose(cycle(5))
    want = sorted((2 * math.cos(2 * math.pi * k / 5) for k in range(5)), reverse=True)
    assert np.allclose(spec.eigenvalues, want, atol=1e-10)
    assert spec.eigenvalues[1] == pytest.approx(0.618034, abs=1e-6)


def test_jacobi_matches_lapack_on_corpus(backend):
    graphs = random_corpus(count=10, max_n=14, seed=4) + [gen_random_regular(120, 7, 0), paley(29)]
    for G in graphs:
        a = eigendecompose(G)
        b = eigendecompose(G, method="lapack")
        assert np.allclose(a.eigenvalues, b.eigenvalues, atol=1e-9)
        a.check_invariants(G)


def test_sign_convention_and_determinism():
    G = gen_random_regular(40, 5, 3)
    a = eigendecompose(G)
    b = eigendecompose(G)
    assert np.array_equal(a.eigenvectors, b.eigenvectors)
    v = a.eigenvectors
    pivots = np.argmax(np.abs(v), axis=0)
    assert np.all(v[pivots, np.arange(G.n)] > 0)
    assert a.method == "jacobi" and a.sweeps > 0


def test_convergence_error_reports_norm(monkeypatch):
    def stuck(a, schedule, tol, max_sweeps):
        n = a.shape[0]
        return np.diag(a).copy(), np.eye(n), max_sweeps, 1.0

    monkeypatch.setattr(kernels, "jacobi_eigh", stuck)
    with pytest.raises(ConvergenceError) as info:
        eigendecompose(cycle(5))
    assert info.value.sweeps == 100
    assert info.value.off_norm == 1.0


def test_symmetric_eigh_guards():
    with pytest.raises(GuardError):
        symmetric_eigh(np.array([[0.0, 1.0], [0.0, 0.0]]))
    with pytest.raises(GuardError):
        symmetric_eigh(np.eye(3), method="qr")


def test_summary_petersen():
    P = petersen()
    s = spectral_summary(eigendecompose(P), P)
    assert s.K == 6
    assert s.Lambda == pytest.approx(27)
    assert s.energy == pytest.approx(16)
    assert s.positive_tail[0] == pytest.approx(5)
    assert s.positive_tail[2] == pytest.approx(5)
    assert s.Lambda1 == pytest.approx(8)
    assert s.Lambda2 == pytest.approx(16)
    assert s.Lambda3 == pytest.approx(32)
    s.check_invariants()


def test_summary_k33():
    G = complete_bipartite(3, 3)
    s = spectral_summary(eigendecompose(G), G)
    assert s.K == 1
    assert s.lambda2 == pytest.approx(0, abs=1e-12)
    assert s.Lambda == pytest.approx(27)
    assert s.positive_tail == (0.0, 0.0, 0.0)


def test_summary_blowup():
    G = gen_blowup(cycle(5), 100)
    s = spectral_summary(eigendecompose(G), G)
    assert s.Lambda == pytest.approx(8e6, rel=1e-9)
    assert s.K == 3  # zero eigenvalues must not count as positive


def test_positive_count_edge_cases():
    assert positive_count(np.array([0.0, 0.0])) == 0
    assert positive_count(np.array([2.0, 1e-12, -2.0])) == 1


def test_summary_invariants_on_corpus():
    for G in random_corpus(count=30, max_n=14, seed=6):
        spectral_summary(eigendecompose(G), G).check_invariants()


@pytest.mark.parametrize("G, want", [(petersen(), 0), (complete(4), 24), (cycle(5), 0), (complete(3), 6)])
def test_triangle_counts(G, want):
    assert triangle_hom_count(G) == want


def test_triangle_count_matches_trace(backend):
    for G in random_corpus(count=15, max_n=14, seed=9):
        a = G.adjacency.astype(np.int64)
        assert triangle_hom_count(G) == int(np.trace(a @ a @ a))


@pytest.mark.parametrize(
    "G, Lam", [(complete(4), 3), (petersen(), 27), (complete_bipartite(3, 3), 27)]
)
def test_lambda_T_identity(G, Lam):
    r = check_lambda_T_identity(G)
    assert r["passed"]
    assert r["d3_minus_T"] == Lam
    assert r["Lambda"] == pytest.approx(Lam)


def test_lambda_T_identity_regular_corpus():
    for G in regular_corpus(max_n=200):
        assert check_lambda_T_identity(G)["passed"]


def test_lambda_T_needs_regular():
    with pytest.raises(GuardError):
        check_lambda_T_identity(path(4))


def test_trace_cube_identity_any_graph():
    for G in random_corpus(count=30, max_n=14, seed=10):
        assert check_trace_cube_identity(G)["passed"]


def test_product_bound_examples():
    r = check_product_bound(petersen())
    assert r["lhs"] == pytest.approx(4) and r["rhs"] == 0.75 and r["passed"]
    r = check_product_bound(cycle(5))
    assert r["lhs"] == pytest.approx((1 + 0.6180339887) * 1.6180339887) and r["passed"]


@pytest.mark.parametrize("seed", range(10))
def test_product_bound_random(seed):
    assert check_product_bound(gen_random_regular(100, 4, seed))["passed"]


def test_product_bound_guards():
    with pytest.raises(GuardError):
        check_product_bound(complete(4))  # d > n/2
    with pytest.raises(GuardError):
        check_product_bound(complete(2))  # complete: lambda2 = -1
    with pytest.raises(GuardError):
        check_product_bound(path(4))
    assert check_product_bound(empty(4))["passed"]


def test_srg_examples():
    assert srg_lambda2(SrgParams(10, 3, 0, 1)) == (1.0, -2.0)
    q3 = metz_params(3)
    assert (q3.n, q3.d, q3.r, q3.s) == (36, 20, 10, 12)
    assert q3.lambda2 == 2 == 3 - 1
    assert q3.lambda_n == -4 == -((3 - 1) ** 2)
    assert q3.feasibility()["feasible"]


@pytest.mark.parametrize("q", [2, 3, 4, 5, 7])
def test_metz_family(q):
    prm = metz_params(q)
    assert prm.lambda2 == pytest.approx(q - 1)
    assert prm.lambda_n == pytest.approx(-((q - 1) ** 2))


def test_metz_q2_is_flagged():
    prm = metz_params(2)
    assert (prm.n, prm.d) == (6, 5)
    report = prm.feasibility()
    assert not report["feasible"]
    assert any("complete" in f for f in report["flags"])


@pytest.mark.parametrize("p, m", [(3, 2), (5, 2), (3, 3), (7, 2)])
def test_dhjp_family(p, m):
    prm = dhjp_params(p, m)
    assert prm.lambda2 == pytest.approx(p**m - p ** (m - 1))
    assert prm.feasibility()["counting_identity"]


def test_dhjp_3_2():
    prm = dhjp_params(3, 2)
    assert prm.n == 729 and prm.d == 168
    assert prm.lambda2 == pytest.approx(6)
    with pytest.raises(GuardError):
        dhjp_params(4, 2)
    with pytest.raises(GuardError):
        dhjp_params(3, 1)


@pytest.mark.parametrize("G, prm", [(petersen(), SrgParams(10, 3, 0, 1)), (paley(13), SrgParams(13, 6, 2, 3))])
def test_srg_formula_matches_solver(G, prm):
    lam = eigendecompose(G).eigenvalues
    assert lam[1] == pytest.approx(prm.lambda2, abs=1e-8)
    assert lam[-1] == pytest.approx(prm.lambda_n, abs=1e-8)
    assert prm.feasibility()["feasible"]


def test_srg_negative_discriminant():
    with pytest.raises(GuardError):
        srg_lambda2(SrgParams(5, 1, 3, 3))
