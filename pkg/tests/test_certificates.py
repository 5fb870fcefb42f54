import json
import math

import numpy as np
import pytest

from disclab.corpus import random_corpus, regular_corpus
from disclab.errors import GuardError, InvariantError
from disclab.exact import disc_plus_exact
from disclab.graph import (
    complete,
    complete_bipartite,
    cycle,
    gen_blowup,
    gen_random_regular,
    paley,
    petersen,
)
from disclab.io import unpack_spectrum_vectors
from disclab.certificates import (
    Certificate,
    EigenCombination,
    cert_cube,
    cert_dense,
    cert_energy_value,
    cert_projector,
    cert_sandwich,
    cert_square_value,
    certify_all,
    disc_matrix,
    hadamard_min_eigs,
    is_psd,
    lambda_case_report,
    psd_check,
    upper_bounds,
)
from disclab.spectral import eigendecompose, spectral_summary

PHI = (1 + math.sqrt(5)) / 2


@pytest.fixture(scope="module")
def blowup500():
    G = gen_blowup(cycle(5), 100)
    return G, eigendecompose(G)


def _spec(G):
    return eigendecompose(G)


# disc(X) ----------------------------------------------------------------------------


def test_disc_identity_matrix():
    G = petersen()
    assert disc_matrix(G, np.eye(10)) == pytest.approx(-3)


def test_disc_single_eigenvector():
    G = petersen()
    spec = _spec(G)
    for i in range(1, 10):
        alpha = np.zeros(10)
        alpha[i] = 1
        assert disc_matrix(G, EigenCombination(alpha, spec)) == pytest.approx(spec.eigenvalues[i], abs=1e-9)


def test_disc_petersen_projector():
    G = petersen()
    spec = _spec(G)
    alpha = np.zeros(10)
    alpha[:6] = 1
    assert disc_matrix(G, EigenCombination(alpha, spec)) == pytest.approx(5)


def test_disc_routes_must_agree():
    G = petersen()
    spec = _spec(G)
    # a spectrum whose vectors do not belong to G: the two routes disagree
    other = eigendecompose(cycle(10))
    with pytest.raises(InvariantError):
        disc_matrix(G, EigenCombination(np.eye(10)[1], other))
    with pytest.raises(GuardError):
        disc_matrix(G, np.eye(9))
    with pytest.raises(GuardError):
        EigenCombination(np.ones(3), spec)


def test_disc_of_characteristic_outer_product():
    # X = 1_U 1_U^T gives 2 disc(U) up to the density convention (d/n vs p)
    G = petersen()
    x = np.zeros(10)
    x[:5] = 1
    X = np.outer(x, x)
    d, n = 3, 10
    assert disc_matrix(G, X) == pytest.approx(2 * 5 - d / n * 25)


def test_inner_product_identity():
    rng = np.random.default_rng(1)
    for G in [petersen(), gen_random_regular(30, 4, 2), paley(13)]:
        spec = _spec(G)
        for _ in range(5):
            a = EigenCombination(rng.standard_normal(G.n), spec)
            b = EigenCombination(rng.standard_normal(G.n), spec)
            X, Y = a.explicit(), b.explicit()
            had = float(np.ones(G.n) @ (X * Y) @ np.ones(G.n))
            inner = float(np.sum(X * Y))
            assert had == pytest.approx(inner, rel=1e-6, abs=1e-9)
            assert inner == pytest.approx(a.inner(b), rel=1e-6, abs=1e-9)


# PSD -------------------------------------------------------------------------------


def test_hadamard_closure():
    mins = hadamard_min_eigs(pairs=50, max_n=60, seed=0)
    assert len(mins) == 50
    assert mins.min() >= -1e-8


def test_psd_check():
    assert is_psd(np.eye(4))
    assert not is_psd(np.diag([1.0, -1.0]))
    lo, norm, method = psd_check(np.diag([2.0, 0.5]))
    assert (lo, norm, method) == (0.5, 2.0, "eigvalsh")


def test_psd_check_rayleigh_path():
    lo, norm, method = psd_check(np.eye(2001))
    assert method == "rayleigh20"
    assert lo == pytest.approx(1.0)


# eigenvalue certificates -------------------------------------------------------------


def test_petersen_certificates():
    G = petersen()
    spec = _spec(G)
    proj = cert_projector(G, spec)
    cube = cert_cube(G, spec)
    assert proj.bound == pytest.approx(5)
    assert cube.bound == pytest.approx(5 / 3)
    assert cert_square_value(spec, 3) == pytest.approx(5 / math.sqrt(3))
    assert cert_energy_value(spec) == pytest.approx(5)
    for cert in (proj, cube):
        cert.check_invariants()
        assert cert.max_diag <= 1 + 1e-9


def test_k4_certificates():
    G = complete(4)
    spec = _spec(G)
    assert cert_projector(G, spec).bound == pytest.approx(0, abs=1e-9)
    assert cert_cube(G, spec).bound == pytest.approx(0, abs=1e-9)
    assert cert_square_value(spec, 3) == pytest.approx(0, abs=1e-9)
    assert cert_energy_value(spec) == pytest.approx(0, abs=1e-9)


def test_k33_projector():
    G = complete_bipartite(3, 3)
    assert cert_projector(G, _spec(G)).bound == pytest.approx(0, abs=1e-9)


def test_c5_energy():
    assert cert_energy_value(_spec(cycle(5))) == pytest.approx((2 + 2 / PHI + 2 * PHI) / 2 - 2)


def test_certificates_meet_targets_on_corpus():
    for G in random_corpus(count=30, max_n=14, seed=12) + regular_corpus(max_n=60):
        spec = _spec(G)
        summary = spectral_summary(spec, G)
        proj = cert_projector(G, spec, summary)
        cube = cert_cube(G, spec, summary)
        for cert in (proj, cube):
            cert.check_invariants()
        assert proj.bound >= summary.positive_tail[0] - 1e-8
        if G.max_degree:
            assert cube.bound >= summary.positive_tail[2] / G.max_degree - 1e-8
            assert cube.max_diag <= 1 + 1e-9


def test_certificate_json_and_dump():
    G = petersen()
    cert = cert_projector(G, _spec(G))
    data = json.loads(json.dumps(cert.to_json()))
    assert set(data) == {"tag", "bound", "discValue", "maxDiag", "minEig", "diagnostics"}
    X = unpack_spectrum_vectors(cert.matrix_dump())
    assert np.allclose(X, cert.explicit())
    with pytest.raises(ValueError):
        Certificate("nope", 0, 0, 0, 0)


def test_bound_normalisation_invariant():
    bad = Certificate("custom", disc_value=4.0, max_diag=2.0, min_eig=0.0, bound=4.0)
    with pytest.raises(InvariantError):
        bad.check_invariants()
    not_psd = Certificate("custom", disc_value=1.0, max_diag=1.0, min_eig=-0.1, bound=1.0)
    with pytest.raises(InvariantError):
        not_psd.check_invariants()


# case analysis ---------------------------------------------------------------------


def test_lambda_case_k4_unmet():
    G = complete(4)
    r = lambda_case_report(G, spectral_summary(_spec(G), G))
    assert r["status"] == "hypotheses unmet"


def test_lambda_case_blowup(blowup500):
    G, spec = blowup500
    r = lambda_case_report(G, spectral_summary(spec, G))
    assert r["regime"] == "Lambda large"
    assert r["branch"] == "sum"
    assert r["Lambda2"] == pytest.approx(2 * (100 * PHI) ** 2, rel=1e-9)
    assert r["Lambda2"] == pytest.approx(52_360, rel=1e-3)
    assert r["route_holds"]


@pytest.mark.slow
def test_lambda_case_random_sparse():
    G = gen_random_regular(1000, 10, 0)
    s = spectral_summary(eigendecompose(G, method="lapack"), G)
    r = lambda_case_report(G, s)
    assert r["hypotheses_met"]
    assert r["regime"] == "Lambda small"
    assert r["best_overall"] >= 0.1 * math.sqrt(10) * 1000


# dense certificate -------------------------------------------------------------------


def test_dense_blowup(blowup500):
    G, spec = blowup500
    cert, diag = cert_dense(G, spec, epsilon=0.1)
    cert.check_invariants()
    diag.check_invariants()
    assert cert.min_eig >= -1e-8 * (1 + cert.diagnostics["norm_estimate"])
    assert cert.max_diag <= 2 + 1e-8
    assert cert.disc_value > 0
    assert cert.bound >= cert.disc_value / 2
    assert diag.in_regime and diag.hypotheses_met
    assert diag.YA_inner == pytest.approx(-8e6 / 200, rel=1e-9)
    assert diag.E_maxdiag <= 1 + 1e-8
    assert diag.YA_frobsq <= diag.YA_bound * (1 + 1e-9)
    assert diag.v1_nonnegative


def test_dense_petersen_e0_only():
    G = petersen()
    spec = _spec(G)
    cert, diag = cert_dense(G, spec)
    assert diag.t == pytest.approx(math.sqrt(3))
    assert diag.discE1 == 0.0
    cert.check_invariants()


def test_dense_y_claims_on_regular_corpus():
    for G in regular_corpus(max_n=60):
        if G.m == 0:
            continue
        spec = _spec(G)
        cert, diag = cert_dense(G, spec, strict=False)
        Lam = spectral_summary(spec, G).Lambda
        assert diag.YA_inner == pytest.approx(-Lam / G.max_degree, rel=1e-6, abs=1e-6)
        assert diag.Y_maxdiag <= 1 + 1e-9


def test_dense_strict_and_relaxed():
    G = gen_random_regular(500, 250, 0)
    spec = eigendecompose(G, method="lapack")
    with pytest.raises(GuardError):
        cert_dense(G, spec, strict=True)
    cert, diag = cert_dense(G, spec, strict=False)
    assert "sparse-regime graph, dense certificate weak" in diag.notes
    assert not diag.hypotheses_met and not diag.in_regime
    Lam = spectral_summary(spec, G).Lambda
    assert Lam < 10 * 250**2


def test_dense_guards():
    G = petersen()
    with pytest.raises(GuardError):
        cert_dense(G, _spec(G), epsilon=0.7)
    from disclab.graph import empty

    E = empty(5)
    with pytest.raises(GuardError):
        cert_dense(E, _spec(E), strict=False)


# sandwich certificate ------------------------------------------------------------------


def test_sandwich_blowup(blowup500):
    G, spec = blowup500
    cert, r = cert_sandwich(G, spec)
    assert r["YA"] == pytest.approx(-40_000, rel=1e-9)
    assert r["trace_Y"] == pytest.approx(G.n - 200)
    assert r["disc_direct"] == pytest.approx(r["disc_closed_form"], rel=1e-6)
    # the form with a bare -d is off by exactly d^2/n
    assert r["stated_form_gap"] == pytest.approx(200**2 / 500, rel=1e-6)
    cert.check_invariants()


def test_sandwich_petersen():
    G = petersen()
    cert, r = cert_sandwich(G, _spec(G))
    assert r["t"] == pytest.approx(1)
    assert r["disc_direct"] == pytest.approx(r["disc_closed_form"], rel=1e-6)
    assert r["YA"] == pytest.approx(-27 / 3)


def test_sandwich_guards():
    K33 = complete_bipartite(3, 3)
    with pytest.raises(GuardError):
        cert_sandwich(K33, _spec(K33))
    K4 = complete(4)
    with pytest.raises(GuardError):
        cert_sandwich(K4, _spec(K4))


# upper bounds -----------------------------------------------------------------------


def test_upper_bound_examples(blowup500):
    P = petersen()
    u = upper_bounds(P, _spec(P))
    assert u["pdisc_upper"] == pytest.approx(10) and u["applicable"]
    K33 = complete_bipartite(3, 3)
    assert upper_bounds(K33, _spec(K33))["pdisc_upper"] == pytest.approx(0, abs=1e-9)
    G, spec = blowup500
    assert upper_bounds(G, spec)["pdisc_upper"] == pytest.approx(100 / PHI * 500, rel=1e-9)


def test_all_bounds_below_lambda2_n():
    for G in regular_corpus(max_n=60):
        spec = _spec(G)
        cap = upper_bounds(G, spec)["pdisc_upper"] + 1e-6 * max(1, G.n)
        summary = spectral_summary(spec, G)
        bounds = [
            cert_projector(G, spec, summary).bound,
            cert_cube(G, spec, summary).bound,
            cert_square_value(spec, G.max_degree),
            cert_energy_value(spec),
        ]
        if G.m:
            bounds.append(cert_dense(G, spec, strict=False)[0].bound)
        assert max(bounds) <= cap, G.name


def test_disc_plus_upper_bound_against_oracle():
    for G in regular_corpus(max_n=16):
        if G.n > 16:
            continue
        u = upper_bounds(G, _spec(G))
        assert float(disc_plus_exact(G).value) <= u["disc_plus_upper"] + 1e-9, G.name


def test_certify_all_skips_cleanly():
    G = complete_bipartite(3, 3)
    out = certify_all(G, _spec(G))
    assert "skipped" in out["sandwichYZ"]
    json.dumps(out)
    P = petersen()
    out = certify_all(P, _spec(P))
    assert out["projector"]["bound"] == pytest.approx(5)
    assert "sandwich" in out["sandwichYZ"]
