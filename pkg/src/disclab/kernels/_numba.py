"""Compiled kernels. Every function here has a same-signature twin in ``_numpy``."""

import numpy as np
from numba import njit

from ._common import N_STATS

_M1 = np.uint64(0x5555555555555555)
_M2 = np.uint64(0x3333333333333333)
_M4 = np.uint64(0x0F0F0F0F0F0F0F0F)
_H01 = np.uint64(0x0101010101010101)


@njit(cache=True, inline="always")
def _popcount64(x):
    x = x - ((x >> np.uint64(1)) & _M1)
    x = (x & _M2) + ((x >> np.uint64(2)) & _M2)
    x = (x + (x >> np.uint64(4))) & _M4
    return (x * _H01) >> np.uint64(56)


@njit(cache=True, inline="always")
def _better(val, mask, best, best_mask):
    return val > best or (val == best and mask < best_mask)


@njit(cache=True)
def enumerate_subsets(indptr, indices, n, m):
    """Walk all 2**n subsets in Gray-code order with O(deg) incremental updates.

    Tracks e(U), |U| and the degree sum of U; every objective is an exact
    integer numerator (see ``_common`` for the output layout).
    """
    c2n = n * (n - 1) // 2
    nn1 = n * (n - 1)
    half_lo = n // 2
    half_hi = n - half_lo
    deg = np.empty(n, np.int64)
    for v in range(n):
        deg[v] = indptr[v + 1] - indptr[v]
    cnt = np.zeros(n, np.int64)  # |N(v) ∩ U|

    out = np.empty(N_STATS, np.int64)
    # empty set: e = 0, size = 0, cut = 0
    d1 = nn1 * m - m * (n * n - n)
    out[0] = 0; out[1] = 0
    out[2] = 0; out[3] = 0
    out[4] = d1; out[5] = 0
    out[6] = 0; out[7] = 0
    big = np.int64(1) << np.int64(62)
    out[8] = big; out[9] = -1
    if half_lo == 0:
        out[8] = 0; out[9] = 0

    mask = np.int64(0)
    e = np.int64(0)
    size = np.int64(0)
    degsum = np.int64(0)
    total = np.int64(1) << np.int64(n)
    for i in range(1, total):
        v = 0
        j = i
        while (j & 1) == 0:
            j >>= 1
            v += 1
        bit = np.int64(1) << np.int64(v)
        if mask & bit:
            mask ^= bit
            e -= cnt[v]
            size -= 1
            degsum -= deg[v]
            for k in range(indptr[v], indptr[v + 1]):
                cnt[indices[k]] -= 1
        else:
            mask |= bit
            e += cnt[v]
            size += 1
            degsum += deg[v]
            for k in range(indptr[v], indptr[v + 1]):
                cnt[indices[k]] += 1
        cut = degsum - 2 * e
        nd = c2n * e - m * (size * (size - 1) // 2)
        if _better(nd, mask, out[0], out[1]):
            out[0] = nd; out[1] = mask
        if _better(-nd, mask, -out[2], out[3]):
            out[2] = nd; out[3] = mask
        s2 = 2 * size - n
        n1 = nn1 * (m - 2 * cut) - m * (s2 * s2 - n)
        if _better(n1, mask, out[4], out[5]):
            out[4] = n1; out[5] = mask
        if _better(cut, mask, out[6], out[7]):
            out[6] = cut; out[7] = mask
        if size == half_lo or size == half_hi:
            if out[9] < 0 or _better(-cut, mask, -out[8], out[9]):
                out[8] = cut; out[9] = mask
    return out


@njit(cache=True)
def jacobi_eigh(a, schedule, tol_abs, max_sweeps):
    """Cyclic Jacobi on a copy of ``a`` using the round-robin pair schedule.

    Returns (diagonal, eigenvectors, sweeps, off_norm). Rotations inside a
    round touch disjoint index pairs, so sequential application here equals the
    simultaneous application of the numpy backend.
    """
    n = a.shape[0]
    a = a.copy()
    v = np.eye(n)
    off = 0.0
    for i in range(n):
        for j in range(n):
            if i != j:
                off += a[i, j] * a[i, j]
    off = np.sqrt(off)
    sweeps = 0
    while off > tol_abs and sweeps < max_sweeps:
        for r in range(schedule.shape[0]):
            for k in range(schedule.shape[1]):
                p = schedule[r, k, 0]
                q = schedule[r, k, 1]
                apq = a[p, q]
                if apq == 0.0:
                    continue
                app = a[p, p]
                aqq = a[q, q]
                theta = (aqq - app) / (2.0 * apq)
                t = 1.0 / (abs(theta) + np.sqrt(theta * theta + 1.0))
                if theta < 0.0:
                    t = -t
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                for i in range(n):
                    aip = a[i, p]
                    aiq = a[i, q]
                    a[i, p] = c * aip - s * aiq
                    a[i, q] = s * aip + c * aiq
                for i in range(n):
                    api = a[p, i]
                    aqi = a[q, i]
                    a[p, i] = c * api - s * aqi
                    a[q, i] = s * api + c * aqi
                a[p, p] = app - t * apq
                a[q, q] = aqq + t * apq
                a[p, q] = 0.0
                a[q, p] = 0.0
                for i in range(n):
                    vip = v[i, p]
                    viq = v[i, q]
                    v[i, p] = c * vip - s * viq
                    v[i, q] = s * vip + c * viq
        sweeps += 1
        off = 0.0
        for i in range(n):
            for j in range(n):
                if i != j:
                    off += a[i, j] * a[i, j]
        off = np.sqrt(off)
    w = np.empty(n)
    for i in range(n):
        w[i] = a[i, i]
    return w, v, sweeps, off


@njit(cache=True)
def triangle_hom_count(packed, indptr, indices):
    """Six times the triangle count, from bit-packed row intersections per edge."""
    n = packed.shape[0]
    words = packed.shape[1]
    total = np.int64(0)
    for u in range(n):
        for k in range(indptr[u], indptr[u + 1]):
            w = indices[k]
            if w <= u:
                continue
            for b in range(words):
                total += np.int64(_popcount64(packed[u, b] & packed[w, b]))
    # each triangle is seen once per edge (3x); T counts ordered triples (6x)
    return 2 * total


@njit(cache=True)
def repair_pairing(edges, n, draws, max_rounds):
    """Double-edge swaps until the multigraph in ``edges`` is simple.

    A swap is only accepted if both new pairs are non-loops and absent, so the
    number of bad pairs never increases. ``draws`` is an (K, 2) array of
    uniforms consumed in order. Returns (draws_used, bad_remaining).
    """
    m = edges.shape[0]
    count = np.zeros((n, n), np.int32)
    for i in range(m):
        a = edges[i, 0]
        b = edges[i, 1]
        count[a, b] += 1
        if a != b:
            count[b, a] += 1
    used = 0
    rounds = 0
    while rounds < max_rounds:
        bad = 0
        for i in range(m):
            a = edges[i, 0]
            b = edges[i, 1]
            if a != b and count[a, b] == 1:
                continue
            bad += 1
            while used < draws.shape[0]:
                j = int(draws[used, 0] * m)
                flip = draws[used, 1] < 0.5
                used += 1
                if j == i:
                    continue
                c = edges[j, 0]
                d = edges[j, 1]
                if flip:
                    c, d = d, c
                if a == c or b == d:
                    continue
                if count[a, c] != 0 or count[b, d] != 0:
                    continue
                if (a == b and c == d) or (a == d and b == c):
                    continue
                count[a, b] -= 1
                if a != b:
                    count[b, a] -= 1
                count[edges[j, 0], edges[j, 1]] -= 1
                if edges[j, 0] != edges[j, 1]:
                    count[edges[j, 1], edges[j, 0]] -= 1
                edges[i, 0] = a; edges[i, 1] = c
                edges[j, 0] = b; edges[j, 1] = d
                count[a, c] += 1; count[c, a] += 1
                count[b, d] += 1; count[d, b] += 1
                break
            if used >= draws.shape[0]:
                break
        rounds += 1
        if bad == 0 or used >= draws.shape[0]:
            break
    remaining = 0
    for i in range(m):
        a = edges[i, 0]
        b = edges[i, 1]
        if a == b or count[a, b] > 1:
            remaining += 1
    return used, remaining
