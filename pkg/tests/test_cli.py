import json
import os
import subprocess
import sys

import numpy as np
import pytest

from disclab import cli, io, kernels
from disclab.errors import GuardError
from disclab.genspec import load_graph, parse_graph_spec
from disclab.harness import SCHEMA_LINE, SWEEP_FIELDS, check_budget, plan_random_regular, select_checks

C5_TEXT = "5 5\n0 1\n1 2\n2 3\n3 4\n4 0\n"
K4_TEXT = "4 6\n0 1\n0 2\n0 3\n1 2\n1 3\n2 3\n"


def run(argv, capsys):
    code = cli.main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


@pytest.fixture
def c5_file(tmp_path):
    path = tmp_path / "c5.el"
    path.write_text(C5_TEXT)
    return str(path)


# subcommands ------------------------------------------------------------------------


def test_exact_c5(c5_file, capsys):
    code, out, _ = run(["exact", "--graph", c5_file], capsys)
    assert code == 0
    data = json.loads(out)
    assert data["discPlus"]["value"] == 0.5
    assert (data["discPlus"]["value_num"], data["discPlus"]["value_den"]) == (1, 2)
    assert data["surplus"]["value"] == 1.5


def test_exact_csv(c5_file, capsys):
    code, out, _ = run(["exact", "--graph", c5_file, "--format", "csv"], capsys)
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "kind,value,value_num,value_den,subset"
    assert lines[1].startswith("discPlus,0.5,1,2,")


def test_spectrum_k4(tmp_path, capsys):
    path = tmp_path / "k4.el"
    path.write_text(K4_TEXT)
    code, out, _ = run(["spectrum", "--graph", str(path)], capsys)
    assert code == 0
    assert np.allclose(json.loads(out)["eigenvalues"], [3, -1, -1, -1], atol=1e-10)
    code, out, _ = run(["spectrum", "--graph", str(path), "--format", "csv"], capsys)
    assert out.splitlines()[0] == "index,eigenvalue"
    assert out.splitlines()[1] == "1,3"  # lambda_1 first


def test_spectrum_vector_dump(tmp_path, capsys):
    dump = tmp_path / "vecs.bin"
    code, _, _ = run(["spectrum", "--graph", "petersen", "--dump-vectors", str(dump)], capsys)
    assert code == 0
    raw = dump.read_bytes()
    assert raw[:8] == b"DLABSPEC"
    assert int.from_bytes(raw[8:16], "little") == 10
    V = io.unpack_spectrum_vectors(raw)
    assert np.allclose(V.T @ V, np.eye(10), atol=1e-10)


def test_certify_petersen_all(capsys):
    code, out, _ = run(["certify", "--graph", "petersen", "--all"], capsys)
    assert code == 0
    data = json.loads(out)
    got = [data["projector"]["bound"], data["cube"]["bound"], data["square"], data["energy"]]
    assert np.allclose(got, [5, 5 / 3, 5 / np.sqrt(3), 5], atol=1e-6)
    assert data["upper"]["pdisc_upper"] == pytest.approx(10)
    assert "denseXZ" in data and "sandwichYZ" in data


def test_round_with_trace(tmp_path, capsys):
    trace = tmp_path / "trace.csv"
    argv = ["round", "--gen", "rr:n=100,d=4,seed=1", "--trials", "30", "--seed", "2", "--trace", str(trace)]
    code, out, _ = run(argv, capsys)
    assert code == 0
    data = json.loads(out)
    assert data["best"]["seed"] == 2 and data["regime"] == "sqrt"
    rows = trace.read_text().splitlines()
    assert rows[0] == "trial,disc" and len(rows) == 31


def test_sdp_command(tmp_path, capsys):
    dump = tmp_path / "factor.bin"
    code, out, _ = run(["sdp", "--graph", "petersen", "--max-iters", "2000", "--dump-factor", str(dump)], capsys)
    assert code == 0
    data = json.loads(out)
    assert 4.9 <= data["state"]["objective"] <= 10.001
    assert data["gap"]["upper_lambda2_n"] == pytest.approx(10)
    assert io.unpack_factor(dump.read_bytes()).shape == (10, data["state"]["k"])


# exit codes -----------------------------------------------------------------------


def test_exit_code_guard(capsys):
    code, _, err = run(["exact", "--gen", "rr:n=30,d=3,seed=0"], capsys)
    assert code == 2
    assert "GuardError" in err


def test_exit_code_parse_error(tmp_path, capsys):
    path = tmp_path / "bad.el"
    path.write_text("2 1\n0 0\n")
    code, _, err = run(["exact", "--graph", str(path)], capsys)
    assert code == 2
    assert "line 2" in err and "self-loop" in err


@pytest.mark.parametrize("flag, value", [("--delta", "2"), ("--epsilon", "0.6"), ("--trials", "0"), ("--threads", "0")])
def test_exit_code_bad_flags(flag, value, capsys):
    code, _, _ = run(["round", "--graph", "c5", flag, value], capsys)
    assert code == 2


def test_missing_graph(capsys):
    code, _, err = run(["spectrum"], capsys)
    assert code == 2 and "graph is required" in err


def test_usage_error_exits_2(capsys):
    with pytest.raises(SystemExit) as info:
        cli.main(["exact", "--graph", "c5", "--gen", "c5"])
    assert info.value.code == 2


def test_threads_env_fallback(monkeypatch):
    monkeypatch.setenv("DISCLAB_THREADS", "3")
    args = cli.build_parser().parse_args(["spectrum", "--graph", "c5"])
    assert cli.config_from_args(args).threads == 3
    monkeypatch.setenv("DISCLAB_THREADS", "many")
    with pytest.raises(GuardError):
        cli.config_from_args(args)


# outputs ----------------------------------------------------------------------------


def test_atomic_write_leaves_no_partial_file(tmp_path, capsys):
    out = tmp_path / "result.json"
    code, _, _ = run(["exact", "--gen", "rr:n=30,d=3,seed=0", "--out", str(out)], capsys)
    assert code == 2
    assert not out.exists()
    assert list(tmp_path.iterdir()) == []
    code, stdout, _ = run(["exact", "--graph", "c5", "--out", str(out)], capsys)
    assert code == 0 and stdout == ""
    assert json.loads(out.read_text())["discPlus"]["value"] == 0.5
    assert [p.name for p in tmp_path.iterdir()] == ["result.json"]


def test_atomic_write_failure_keeps_old_file(tmp_path, monkeypatch):
    target = tmp_path / "keep.txt"
    target.write_text("old")

    def boom(*_):
        raise OSError("disk full")

    monkeypatch.setattr(os, "replace", boom)
    with pytest.raises(OSError):
        io.atomic_write_text(target, "new")
    assert target.read_text() == "old"
    assert [p.name for p in tmp_path.iterdir()] == ["keep.txt"]


def test_fmt_float():
    assert io.fmt_float(0.1 + 0.2) == "0.3"
    assert io.fmt_float(3.0) == "3"
    assert io.fmt_float(None) == ""
    assert io.fmt_float(1 / 3) == "0.333333333333"


SWEEP_ARGS = ["sweep", "--n", "40", "--d", "4", "6", "--seeds", "0", "1", "--trials", "10", "--max-iters", "200"]


def test_sweep_csv_byte_identical(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert cli.main(SWEEP_ARGS + ["--out", str(a)]) == 0
    assert cli.main(SWEEP_ARGS + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    lines = a.read_text().splitlines()
    assert lines[0] == SCHEMA_LINE
    assert lines[1] == ",".join(SWEEP_FIELDS)
    assert len(lines) == 2 + 4
    keys = [tuple(map(int, row.split(",")[:2])) + (int(row.split(",")[3]),) for row in lines[2:]]
    assert keys == sorted(keys)


def test_sweep_threads_match_serial(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert cli.main(SWEEP_ARGS + ["--out", str(a)]) == 0
    assert cli.main(SWEEP_ARGS + ["--out", str(b), "--threads", "2"]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_sweep_timings_opt_in(capsys):
    code, out, _ = run(SWEEP_ARGS[:5] + ["--seeds", "0", "--no-sdp", "--with-timings", "--trials", "5"], capsys)
    assert code == 0
    assert out.splitlines()[1].endswith("msSpectrum,msCertify,msSdp,msRound")


def test_sweep_blowup_json(capsys):
    code, out, _ = run(["sweep", "--base", "c5", "--k", "4", "--no-sdp", "--trials", "5", "--format", "json"], capsys)
    assert code == 0
    rec = json.loads(out)["records"][0]
    assert rec["n"] == 20 and rec["d"] == 8 and rec["certDense"] is not None


def test_sweep_budget():
    with pytest.raises(GuardError, match="estimated cost"):
        check_budget(plan_random_regular([2000], [10], [0]))
    with pytest.raises(GuardError):
        check_budget(plan_random_regular([100], list(range(2, 12, 2)), list(range(41))))


def test_sweep_needs_grid(capsys):
    code, _, _ = run(["sweep"], capsys)
    assert code == 2


# verify ---------------------------------------------------------------------------


def test_verify_only_surplus(capsys):
    code, out, _ = run(["verify", "--only", "surplus"], capsys)
    assert code == 0
    report = json.loads(out)
    assert report["passed"]
    assert {c["name"] for c in report["checks"]} == {"surplus.linkage", "surplus.bisection"}


def test_verify_only_unknown(capsys):
    code, _, _ = run(["verify", "--only", "nothing-matches"], capsys)
    assert code == 2


def test_select_by_module():
    names = {c.name for c in select_checks(["spectral"])}
    assert names == {c.name for c in select_checks(None) if c.module == "spectral"}


def test_verify_fault_injection(monkeypatch, capsys):
    real = kernels.jacobi_eigh

    def corrupted(a, schedule, tol, max_sweeps):
        w, v, sweeps, off = real(a, schedule, tol, max_sweeps)
        return w + 1e-3, v, sweeps, off  # wrong eigenvalues, claimed converged

    monkeypatch.setattr(kernels, "jacobi_eigh", corrupted)
    code, out, err = run(["verify", "--only", "spectral.invariants"], capsys)
    assert code == 3
    report = json.loads(out)
    assert not report["passed"]
    failures = report["checks"][0]["failures"]
    assert failures and "residual" in failures[0]["detail"]
    assert "spectral.invariants" in err


@pytest.mark.slow
def test_verify_fresh_checkout(capsys):
    code, out, _ = run(["verify"], capsys)
    assert code == 0
    assert json.loads(out)["passed"]


# generator specs -----------------------------------------------------------------------


@pytest.mark.parametrize(
    "spec, n, m",
    [
        ("petersen", 10, 15),
        ("c5", 5, 5),
        ("P3", 3, 2),
        ("k4", 4, 6),
        ("k3x3", 6, 9),
        ("empty4", 4, 0),
        ("star9", 10, 9),
        ("paley13", 13, 39),
        ("rr:n=20,d=3,seed=1", 20, 30),
        ("turan:n=6,r=3", 6, 12),
        ("blowup:c5,k=3", 15, 45),
        ("complement:c5", 5, 5),
    ],
)
def test_graph_specs(spec, n, m):
    G = parse_graph_spec(spec)
    assert (G.n, G.m) == (n, m)


@pytest.mark.parametrize("spec", ["q7", "rr:n=10,d=3", "rr:n=x,d=3,seed=0", "gnp:n=5,p=z,seed=0", "blowup:c5"])
def test_bad_graph_specs(spec):
    with pytest.raises(GuardError):
        parse_graph_spec(spec)


def test_load_graph_prefers_file(tmp_path):
    path = tmp_path / "petersen"
    path.write_text(C5_TEXT)
    assert load_graph(str(path)).n == 5


def test_console_script():
    out = subprocess.run(
        [sys.executable, "-m", "disclab.cli", "exact", "--graph", "c5"], capture_output=True, text=True
    )
    assert out.returncode == 0
    assert json.loads(out.stdout)["discPlus"]["value"] == 0.5
