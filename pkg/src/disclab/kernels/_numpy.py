"""Pure-numpy twins of the compiled kernels (selected with DISCLAB_NO_NUMBA=1)."""

import numpy as np

from ._common import N_STATS

_LOW_BITS = 16


def _subset_tables(nbr_masks, deg):
    """Size, e(U) and degree-sum for every subset of ``len(deg)`` vertices.

    Built by doubling: subsets containing bit v extend the already finished
    tables of subsets below 2**v.
    """
    k = len(deg)
    size = np.zeros(1 << k, np.int64)
    e = np.zeros(1 << k, np.int64)
    degsum = np.zeros(1 << k, np.int64)
    for v in range(k):
        lo = 1 << v
        r = np.arange(lo, dtype=np.int64)
        size[lo : 2 * lo] = size[:lo] + 1
        e[lo : 2 * lo] = e[:lo] + size[nbr_masks[v] & r]
        degsum[lo : 2 * lo] = degsum[:lo] + deg[v]
    return size, e, degsum


def _take(out, slot, vals, masks, maximize):
    if vals.size == 0:
        return
    i = int(np.argmax(vals) if maximize else np.argmin(vals))
    val, mask = int(vals[i]), int(masks[i])
    best, best_mask = int(out[slot]), int(out[slot + 1])
    if best_mask < 0:
        better = True
    elif maximize:
        better = val > best or (val == best and mask < best_mask)
    else:
        better = val < best or (val == best and mask < best_mask)
    if better:
        out[slot] = val
        out[slot + 1] = mask


def enumerate_subsets(indptr, indices, n, m):
    """Same contract as the compiled Gray-code walk, vectorised by blocks.

    The low ``L`` vertices are tabulated once; high masks are visited in Gray
    order while the low/high cross-edge counts are updated one vertex at a time.
    """
    deg = np.diff(indptr).astype(np.int64)
    low = min(n, _LOW_BITS)
    high = n - low
    nbr = np.zeros(n, np.int64)
    for v in range(n):
        for w in indices[indptr[v] : indptr[v + 1]]:
            nbr[v] |= np.int64(1) << np.int64(w)
    low_all = (np.int64(1) << np.int64(low)) - 1
    nbr_low = nbr & low_all
    nbr_high = nbr >> np.int64(low)

    size_l, e_l, deg_l = _subset_tables(nbr_low[:low], deg[:low])
    size_h, e_h, deg_h = _subset_tables(nbr_high[low:], deg[low:])
    lmask = np.arange(1 << low, dtype=np.int64)
    # cross[v - low][l] = |N(v) ∩ l| for high vertex v
    cross_v = [size_l[nbr_low[v] & lmask] for v in range(low, n)]

    c2n = n * (n - 1) // 2
    nn1 = n * (n - 1)
    half_lo, half_hi = n // 2, n - n // 2
    out = np.zeros(N_STATS, np.int64)
    out[1::2] = -1

    cross = np.zeros(1 << low, np.int64)
    h = 0
    for i in range(1 << high):
        if i:
            v = (i & -i).bit_length() - 1
            bit = 1 << v
            if h & bit:
                cross -= cross_v[v]
            else:
                cross += cross_v[v]
            h ^= bit
        masks = (np.int64(h) << np.int64(low)) | lmask
        size = size_l + size_h[h]
        e = e_l + e_h[h] + cross
        cut = deg_l + deg_h[h] - 2 * e
        nd = c2n * e - m * (size * (size - 1) // 2)
        s2 = 2 * size - n
        n1 = nn1 * (m - 2 * cut) - m * (s2 * s2 - n)
        _take(out, 0, nd, masks, True)
        _take(out, 2, nd, masks, False)
        _take(out, 4, n1, masks, True)
        _take(out, 6, cut, masks, True)
        eq = (size == half_lo) | (size == half_hi)
        _take(out, 8, cut[eq], masks[eq], False)
    return out


def jacobi_eigh(a, schedule, tol_abs, max_sweeps):
    """Cyclic Jacobi applying each round's disjoint rotations simultaneously."""
    n = a.shape[0]
    a = np.array(a, dtype=np.float64, copy=True)
    v = np.eye(n)

    mask = ~np.eye(n, dtype=bool)

    def off_norm():
        # summed directly: ||A||^2 - sum(diag^2) cancels catastrophically near convergence
        return float(np.sqrt(np.sum(a[mask] ** 2)))

    off = off_norm()
    sweeps = 0
    while off > tol_abs and sweeps < max_sweeps:
        for rnd in schedule:
            p, q = rnd[:, 0], rnd[:, 1]
            apq = a[p, q]
            live = apq != 0.0
            if not live.any():
                continue
            p, q, apq = p[live], q[live], apq[live]
            app, aqq = a[p, p], a[q, q]
            theta = (aqq - app) / (2.0 * apq)
            t = np.copysign(1.0 / (np.abs(theta) + np.sqrt(theta * theta + 1.0)), theta)
            c = 1.0 / np.sqrt(t * t + 1.0)
            s = t * c
            ap, aq = a[:, p], a[:, q]
            a[:, p] = c * ap - s * aq
            a[:, q] = s * ap + c * aq
            ap, aq = a[p, :], a[q, :]
            a[p, :] = c[:, None] * ap - s[:, None] * aq
            a[q, :] = s[:, None] * ap + c[:, None] * aq
            a[p, p] = app - t * apq
            a[q, q] = aqq + t * apq
            a[p, q] = 0.0
            a[q, p] = 0.0
            vp, vq = v[:, p], v[:, q]
            v[:, p] = c * vp - s * vq
            v[:, q] = s * vp + c * vq
        sweeps += 1
        off = off_norm()
    return np.diag(a).copy(), v, sweeps, off


def triangle_hom_count(packed, indptr, indices):
    n = len(indptr) - 1
    adj = np.zeros((n, n))
    rows = np.repeat(np.arange(n), np.diff(indptr))
    adj[rows, indices] = 1.0
    # float64 is exact for these integer counts at n <= 4000
    return int(round(float(np.sum((adj @ adj) * adj))))


def repair_pairing(edges, n, draws, max_rounds):
    m = edges.shape[0]
    count = np.zeros((n, n), np.int32)
    np.add.at(count, (edges[:, 0], edges[:, 1]), 1)
    off = edges[:, 0] != edges[:, 1]
    np.add.at(count, (edges[off, 1], edges[off, 0]), 1)
    used = 0
    k = draws.shape[0]
    for _ in range(max_rounds):
        bad = 0
        for i in range(m):
            a, b = int(edges[i, 0]), int(edges[i, 1])
            if a != b and count[a, b] == 1:
                continue
            bad += 1
            while used < k:
                j = int(draws[used, 0] * m)
                flip = draws[used, 1] < 0.5
                used += 1
                if j == i:
                    continue
                c, d = int(edges[j, 0]), int(edges[j, 1])
                if flip:
                    c, d = d, c
                if a == c or b == d or count[a, c] or count[b, d]:
                    continue
                if (a == b and c == d) or (a == d and b == c):
                    continue
                count[a, b] -= 1
                if a != b:
                    count[b, a] -= 1
                x, y = int(edges[j, 0]), int(edges[j, 1])
                count[x, y] -= 1
                if x != y:
                    count[y, x] -= 1
                edges[i] = (a, c)
                edges[j] = (b, d)
                count[a, c] += 1
                count[c, a] += 1
                count[b, d] += 1
                count[d, b] += 1
                break
            if used >= k:
                break
        if bad == 0 or used >= k:
            break
    lo = edges[:, 0]
    hi = edges[:, 1]
    remaining = int(np.sum((lo == hi) | (count[lo, hi] > 1)))
    return used, remaining
