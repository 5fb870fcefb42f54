"""Compare the numba and pure-numpy kernel backends on representative inputs.

    python benchmarks/bench_kernels.py [--repeat 3] [--quick]

Each kernel is run once per backend to warm up (numba compiles on first call,
or loads from its on-disk cache), then timed ``--repeat`` times; the best time
is reported. Outputs of the two backends are compared before timing.
"""

import argparse
import time

import numpy as np

from disclab import kernels
from disclab.graph import gen_gnp, gen_random_regular


def _best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def _cases(quick):
    n_enum = 16 if quick else 21
    n_jac = 80 if quick else 200
    n_tri = 400 if quick else 1500
    G_enum = gen_gnp(n_enum, 0.5, seed=1)
    G_jac = gen_random_regular(n_jac, 6, seed=2)
    G_tri = gen_random_regular(n_tri, 40, seed=3)
    indptr, indices = G_enum.csr
    a = G_jac.adjacency_matrix()
    schedule = kernels.round_robin_schedule(n_jac)
    tol = 1e-12 * float(np.linalg.norm(a))
    t_indptr, t_indices = G_tri.csr

    # a dense configuration-model pairing (many loops and duplicates), repaired by double-edge swaps
    n_rep, d_rep = (300, 40) if quick else (2000, 200)
    rng = np.random.default_rng(4)
    base_edges = rng.permutation(np.repeat(np.arange(n_rep), d_rep)).reshape(-1, 2)
    draws = rng.random((20 * len(base_edges), 2))

    def repair():
        edges = base_edges.copy()
        return kernels.repair_pairing(edges, n_rep, draws, 10_000)

    return [
        (f"enumerate_subsets n={n_enum}", lambda: kernels.enumerate_subsets(indptr, indices, n_enum, G_enum.m)),
        (f"jacobi_eigh n={n_jac}", lambda: kernels.jacobi_eigh(a, schedule, tol, 100)[0]),
        (f"triangle_hom_count n={n_tri}", lambda: kernels.triangle_hom_count(G_tri.packed_rows, t_indptr, t_indices)),
        (f"repair_pairing n={n_rep} d={d_rep}", repair),
    ]


def _same(x, y):
    if isinstance(x, np.ndarray):
        return np.allclose(np.sort(x), np.sort(y)) if x.dtype.kind == "f" else np.array_equal(x, y)
    return x == y


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--quick", action="store_true", help="small inputs (smoke run)")
    args = parser.parse_args(argv)

    backends = kernels.available_backends()
    if "numba" not in backends:
        print("numba is not importable; only the numpy backend can be timed")
    rows = []
    for label, fn in _cases(args.quick):
        times = {}
        outputs = {}
        for name in backends:
            with kernels.use_backend(name):
                outputs[name] = fn()  # warm-up / compile
                times[name] = _best_of(fn, args.repeat)
        agree = all(_same(outputs[backends[0]], outputs[b]) for b in backends[1:])
        rows.append((label, times, agree))

    print(f"{'kernel':36s} " + " ".join(f"{b + ' [s]':>12s}" for b in backends) + "   speedup  agree")
    for label, times, agree in rows:
        speed = times["numpy"] / times["numba"] if "numba" in times and times["numba"] > 0 else float("nan")
        cells = " ".join(f"{times[b]:12.4f}" for b in backends)
        print(f"{label:36s} {cells}   {speed:7.1f}x  {'yes' if agree else 'NO'}")
    return 0 if all(agree for _, _, agree in rows) else 1


if __name__ == "__main__":
    raise SystemExit(main())
