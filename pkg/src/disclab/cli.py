"""``disc-lab`` command line.

Exit codes: 0 success, 2 guard or usage error, 3 internal invariant failure.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass, field
from typing import Optional

from . import certificates as certs
from . import exact, harness, io, rounding, sdp, spectral
from .errors import DiscLabError, GuardError, InvariantError
from .genspec import load_graph

FORMATS = ("json", "csv")


@dataclass(frozen=True)
class RunConfig:
    command: str
    source: Optional[str] = None
    delta: float = rounding.DEFAULT_DELTA
    epsilon: float = 0.1
    trials: int = 200
    seed: int = 0
    threads: int = 1
    out: Optional[str] = None
    fmt: str = "json"
    extra: dict = field(default_factory=dict)

    def validate(self) -> None:
        if not (0 < self.delta < 1):
            raise GuardError(f"--delta must lie in (0, 1), got {self.delta}")
        if not (0 < self.epsilon < 0.5):
            raise GuardError(f"--epsilon must lie in (0, 1/2), got {self.epsilon}")
        if self.trials < 1:
            raise GuardError("--trials must be >= 1")
        if self.seed < 0:
            raise GuardError("--seed must be non-negative")
        if self.threads < 1:
            raise GuardError("--threads must be >= 1")
        if self.fmt not in FORMATS:
            raise GuardError(f"--format must be one of {FORMATS}")


def _default_threads() -> int:
    raw = os.environ.get("DISCLAB_THREADS", "1")
    try:
        return int(raw)
    except ValueError:
        raise GuardError(f"DISCLAB_THREADS={raw!r} is not an integer") from None


def _emit(config: RunConfig, text: str) -> None:
    if config.out:
        io.atomic_write_text(config.out, text)
    else:
        sys.stdout.write(text)


def _graph(config: RunConfig):
    if not config.source:
        raise GuardError("a graph is required: pass --graph FILE|SPEC or --gen SPEC")
    return load_graph(config.source)


def _header(config, G) -> dict:
    return {"command": config.command, "graph": config.source, "name": G.name, "n": G.n, "m": G.m}


def cmd_exact(config: RunConfig) -> None:
    G = _graph(config)
    allow = bool(config.extra.get("allow_large"))
    results = {
        "discPlus": exact.disc_plus_exact(G, allow),
        "discMinus": exact.disc_minus_exact(G, allow),
        "disc1Plus": exact.disc1_plus_exact(G, allow),
        "surplus": exact.surplus_exact(G, allow),
        "deficit": exact.deficit_exact(G, allow),
    }
    for r in results.values():
        r.verify(G)
    if config.fmt == "csv":
        lines = ["kind,value,value_num,value_den,subset"]
        for kind, r in results.items():
            subset = " ".join(str(v) for v in r.subset)
            lines.append(f"{kind},{io.fmt_float(float(r.value))},{r.value.numerator},{r.value.denominator},{subset}")
        _emit(config, "\n".join(lines) + "\n")
        return
    out = _header(config, G)
    for kind, r in results.items():
        out[kind] = {**r.to_json(), "value": float(r.value)}
    _emit(config, io.dumps_json(out))


def cmd_spectrum(config: RunConfig) -> None:
    G = _graph(config)
    sp = spectral.eigendecompose(G)
    sp.check_invariants(G)
    summary = spectral.spectral_summary(sp, G)
    dump = config.extra.get("dump_vectors")
    if dump:
        io.atomic_write_bytes(dump, io.pack_spectrum_vectors(sp.eigenvectors))
    if config.fmt == "csv":
        _emit(config, io.eigenvalues_csv(sp.eigenvalues))
        return
    out = _header(config, G)
    out.update(
        eigenvalues=[float(x) for x in sp.eigenvalues],
        residual=sp.residual,
        sweeps=sp.sweeps,
        summary=summary.to_json(),
        triangleHomCount=spectral.triangle_hom_count(G),
    )
    _emit(config, io.dumps_json(out))


def cmd_certify(config: RunConfig) -> None:
    G = _graph(config)
    sp = spectral.eigendecompose(G)
    sp.check_invariants(G)
    report = certs.certify_all(G, sp, config.epsilon, dense=bool(config.extra.get("all")))
    upper = report["upper"]
    if upper["applicable"]:
        tol = 1e-6 * max(1, G.n)
        for key in ("projector", "cube", "denseXZ", "sandwichYZ"):
            bound = report.get(key, {}).get("bound")
            if bound is not None and bound > upper["pdisc_upper"] + tol:
                raise InvariantError(f"{key} bound {bound} exceeds lambda2 n = {upper['pdisc_upper']}")
    if config.fmt == "csv":
        lines = ["certificate,bound"]
        for key in ("projector", "cube"):
            lines.append(f"{key},{io.fmt_float(report[key]['bound'])}")
        lines.append(f"square,{io.fmt_float(report['square'])}")
        lines.append(f"energy,{io.fmt_float(report['energy'])}")
        for key in ("denseXZ", "sandwichYZ"):
            if key in report:
                lines.append(f"{key},{io.fmt_float(report[key].get('bound'))}")
        lines.append(f"upperLambda2n,{io.fmt_float(upper['pdisc_upper'])}")
        _emit(config, "\n".join(lines) + "\n")
        return
    _emit(config, io.dumps_json({**_header(config, G), **report}))


def cmd_round(config: RunConfig) -> None:
    G = _graph(config)
    ens = rounding.build_sparse_vectors(G, config.delta)
    best = rounding.hyperplane_round(ens, G, config.trials, config.seed)
    best.verify(G)
    trace = config.extra.get("trace")
    if trace:
        io.atomic_write_text(trace, rounding.trace_csv(rounding.trial_values(ens, G, config.trials, config.seed)))
    out = _header(config, G)
    out.update(best={**best.to_json(), "value": float(best.value)}, z=ens.z, regime=ens.regime)
    if G.n <= rounding.EXPECTATION_GUARD:
        out["expectedDisc"] = rounding.expected_disc(ens, G)
    _emit(config, io.dumps_json(out))


def cmd_sdp(config: RunConfig) -> None:
    G = _graph(config)
    cfg = sdp.SdpConfig(
        k=config.extra.get("rank"), max_iters=config.extra.get("max_iters", 5000), seed=config.seed
    )
    state = sdp.sdp_solve(G, cfg)
    rounded = sdp.sdp_round(G, state, config.trials, config.seed)
    rounded.verify(G)
    sp = spectral.eigendecompose(G)
    report = sdp.sdp_gap_report(G, state, sp)
    dump = config.extra.get("dump_factor")
    if dump:
        io.atomic_write_bytes(dump, state.dump())
    out = _header(config, G)
    out.update(state=state.to_json(), rounding={**rounded.to_json(), "value": float(rounded.value)}, gap=report)
    _emit(config, io.dumps_json(out))


def cmd_sweep(config: RunConfig) -> None:
    x = config.extra
    if x.get("base"):
        points = harness.plan_blowup(x["base"], x.get("k") or [20, 60, 100])
    else:
        if not x.get("n") or not x.get("d"):
            raise GuardError("sweep needs --n and --d (or --base and --k)")
        points = harness.plan_random_regular(x["n"], x["d"], x.get("seeds") or [0])
    options = harness.SweepOptions(
        epsilon=config.epsilon,
        delta=config.delta,
        trials=config.trials,
        sdp=not x.get("no_sdp"),
        sdp_max_iters=x.get("max_iters", 5000),
        with_timings=bool(x.get("with_timings")),
    )
    records = harness.run_sweep(points, options, config.threads)
    if config.fmt == "json":
        _emit(config, io.dumps_json({"schema": 1, "records": records}))
    else:
        _emit(config, harness.sweep_csv(records, options.with_timings))


def cmd_verify(config: RunConfig) -> int:
    report = harness.run_verify(config.extra.get("only"))
    _emit(config, io.dumps_json(report))
    if not report["passed"]:
        failed = [c["name"] for c in report["checks"] if not c["passed"]]
        print(f"verify: {len(failed)} check(s) failed: {', '.join(failed)}", file=sys.stderr)
        return InvariantError.exit_code
    return 0


COMMANDS = {
    "exact": cmd_exact,
    "spectrum": cmd_spectrum,
    "certify": cmd_certify,
    "round": cmd_round,
    "sdp": cmd_sdp,
    "sweep": cmd_sweep,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    src = common.add_mutually_exclusive_group()
    src.add_argument("--graph", help="edge-list file or generator spec (e.g. petersen, c5, k3x3)")
    src.add_argument("--gen", help="generator spec, e.g. rr:n=500,d=22,seed=7 or blowup:c5,k=100")
    common.add_argument("--delta", type=float, default=rounding.DEFAULT_DELTA)
    common.add_argument("--epsilon", type=float, default=0.1)
    common.add_argument("--trials", type=int, default=200)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--threads", type=int, default=None, help="worker processes (default: $DISCLAB_THREADS or 1)")
    common.add_argument("--out", help="output path (written atomically); stdout if omitted")
    common.add_argument("--format", choices=FORMATS, default=None)

    parser = argparse.ArgumentParser(prog="disc-lab", description="Graph positive-discrepancy toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("exact", parents=[common], help="exact optima by subset enumeration")
    p.add_argument("--allow-large", action="store_true", help="permit 24 < n <= 40")

    p = sub.add_parser("spectrum", parents=[common], help="eigenvalues and spectral summary")
    p.add_argument("--dump-vectors", help="write eigenvectors in the DLABSPEC binary format")

    p = sub.add_parser("certify", parents=[common], help="spectral certificates and upper bounds")
    p.add_argument("--all", action="store_true", help="also build the dense and sandwich certificates")

    p = sub.add_parser("round", parents=[common], help="hyperplane rounding of the sparse assignment")
    p.add_argument("--trace", help="CSV of per-trial disc values")

    p = sub.add_parser("sdp", parents=[common], help="low-rank SDP ascent, rounding and gap report")
    p.add_argument("--rank", type=int, default=None)
    p.add_argument("--max-iters", type=int, default=5000)
    p.add_argument("--dump-factor", help="write V in the DLABFACT binary format")

    p = sub.add_parser("sweep", parents=[common], help="regime sweep to CSV")
    p.add_argument("--n", type=int, nargs="+")
    p.add_argument("--d", type=int, nargs="+")
    p.add_argument("--seeds", type=int, nargs="+")
    p.add_argument("--base", help="regular base graph for a blow-up series, e.g. c5")
    p.add_argument("--k", type=int, nargs="+", help="blow-up factors")
    p.add_argument("--no-sdp", action="store_true")
    p.add_argument("--max-iters", type=int, default=5000)
    p.add_argument("--with-timings", action="store_true", help="append per-stage wall times (not reproducible)")

    p = sub.add_parser("verify", parents=[common], help="run the invariant and property checks")
    p.add_argument("--only", nargs="+", help="run checks whose name contains a token (or whose module matches)")
    return parser


_EXTRA_KEYS = (
    "allow_large", "dump_vectors", "all", "trace", "rank", "max_iters", "dump_factor",
    "n", "d", "seeds", "base", "k", "no_sdp", "with_timings", "only",
)


def config_from_args(args) -> RunConfig:
    fmt = args.format or ("csv" if args.command == "sweep" else "json")
    config = RunConfig(
        command=args.command,
        source=args.graph or args.gen,
        delta=args.delta,
        epsilon=args.epsilon,
        trials=args.trials,
        seed=args.seed,
        threads=args.threads if args.threads is not None else _default_threads(),
        out=args.out,
        fmt=fmt,
        extra={k: getattr(args, k) for k in _EXTRA_KEYS if getattr(args, k, None) is not None},
    )
    config.validate()
    return config


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = config_from_args(args)
        code = COMMANDS[config.command](config)
        return int(code or 0)
    except DiscLabError as exc:
        print(f"disc-lab {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
