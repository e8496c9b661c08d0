"""Numba-compiled hot kernels.

The numpy module ``_kernels_numpy`` implements the same contracts with
vectorized array code; both are exercised by the test suite.
"""

import math

import numpy as np
from numba import njit

NAME = "numba"

_U53 = 2.0**-52


@njit(cache=True, nogil=True)
def _offnorm(a):
    k = a.shape[0]
    acc = 0.0
    for i in range(k):
        for j in range(i + 1, k):
            acc += a[i, j] * a[i, j]
    return math.sqrt(2.0 * acc)


@njit(cache=True, nogil=True)
def _jacobi_inplace(a, v, want, tol, max_sweeps):
    k = a.shape[0]
    fro2 = 0.0
    for i in range(k):
        for j in range(k):
            fro2 += a[i, j] * a[i, j]
    thresh = tol * (1.0 + math.sqrt(fro2))
    sweeps = 0
    off = _offnorm(a)
    while off >= thresh and sweeps < max_sweeps:
        for p in range(k - 1):
            for q in range(p + 1, k):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                app = a[p, p]
                aqq = a[q, q]
                theta = (aqq - app) / (2.0 * apq)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
                    if theta < 0.0:
                        t = -t
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                for r in range(k):
                    if r != p and r != q:
                        arp = a[r, p]
                        arq = a[r, q]
                        nrp = c * arp - s * arq
                        nrq = s * arp + c * arq
                        a[r, p] = nrp
                        a[p, r] = nrp
                        a[r, q] = nrq
                        a[q, r] = nrq
                a[p, p] = app - t * apq
                a[q, q] = aqq + t * apq
                a[p, q] = 0.0
                a[q, p] = 0.0
                if want:
                    for r in range(k):
                        vrp = v[r, p]
                        vrq = v[r, q]
                        v[r, p] = c * vrp - s * vrq
                        v[r, q] = s * vrp + c * vrq
        sweeps += 1
        off = _offnorm(a)
    return sweeps, off


@njit(cache=True, nogil=True)
def jacobi_eigh(a, want_vectors, tol, max_sweeps):
    """Cyclic Jacobi on a copy of ``a``.

    Returns (values descending, vectors or empty, sweeps, final off-diagonal norm).
    """
    k = a.shape[0]
    w = a.copy()
    if want_vectors:
        v = np.eye(k)
    else:
        v = np.empty((0, 0))
    sweeps, off = _jacobi_inplace(w, v, want_vectors, tol, max_sweeps)
    d = np.empty(k)
    for i in range(k):
        d[i] = w[i, i]
    order = np.argsort(-d, kind="mergesort")
    vals = d[order]
    if want_vectors:
        vecs = np.empty((k, k))
        for j in range(k):
            for i in range(k):
                vecs[i, j] = v[i, order[j]]
        return vals, vecs, sweeps, off
    return vals, v, sweeps, off


@njit(cache=True, nogil=True)
def _lambda1(a, tol, max_sweeps):
    w = a.copy()
    v = np.empty((0, 0))
    _jacobi_inplace(w, v, False, tol, max_sweeps)
    best = w[0, 0]
    for i in range(1, w.shape[0]):
        if w[i, i] > best:
            best = w[i, i]
    return best


@njit(cache=True, nogil=True)
def lambda1_batch(mats, tol, max_sweeps):
    out = np.empty(mats.shape[0])
    for b in range(mats.shape[0]):
        out[b] = _lambda1(mats[b], tol, max_sweeps)
    return out


@njit(cache=True, nogil=True)
def polar_fill(raw, out, start):
    """Marsaglia polar normals from consecutive uint64 pairs.

    Writes into ``out[start:]`` and returns (filled index, raw words used).
    A pair is rejected unless 0 < s < 1; a trailing odd normal is discarded.
    """
    n = out.shape[0]
    i = start
    k = 0
    nraw = raw.shape[0] - raw.shape[0] % 2
    while i < n and k < nraw:
        u1 = float(raw[k] >> np.uint64(11)) * _U53 - 1.0
        u2 = float(raw[k + 1] >> np.uint64(11)) * _U53 - 1.0
        k += 2
        s = u1 * u1 + u2 * u2
        if s >= 1.0 or s == 0.0:
            continue
        f = math.sqrt(-2.0 * math.log(s) / s)
        out[i] = u1 * f
        i += 1
        if i < n:
            out[i] = u2 * f
            i += 1
    return i, k


@njit(cache=True, nogil=True)
def _minor(a, idx):
    k = idx.shape[0]
    out = np.empty((k, k))
    for i in range(k):
        for j in range(k):
            out[i, j] = a[idx[i], idx[j]]
    return out


@njit(cache=True, nogil=True)
def _sorted_copy(idx):
    out = idx.copy()
    out.sort()
    return out


@njit(cache=True, nogil=True)
def _lexless(x, y):
    for i in range(x.shape[0]):
        if x[i] < y[i]:
            return True
        if x[i] > y[i]:
            return False
    return False


@njit(cache=True, nogil=True)
def _tol(v, rtol):
    return rtol * (1.0 + abs(v))


@njit(cache=True, nogil=True)
def greedy_max(a, m, tol, max_sweeps):
    """Grow a subset from the largest diagonal entry by best lambda1 increment."""
    p = a.shape[0]
    used = np.zeros(p, dtype=np.bool_)
    sub = np.empty(m, dtype=np.int64)
    first = 0
    for i in range(1, p):
        if a[i, i] > a[first, first]:
            first = i
    sub[0] = first
    used[first] = True
    val = a[first, first]
    for d in range(1, m):
        best_j = -1
        best_v = -np.inf
        trial = np.empty(d + 1, dtype=np.int64)
        for j in range(p):
            if used[j]:
                continue
            for t in range(d):
                trial[t] = sub[t]
            trial[d] = j
            v = _lambda1(_minor(a, _sorted_copy(trial)), tol, max_sweeps)
            # exact ties go to the larger diagonal entry, then the smaller index
            if v > best_v or (v == best_v and a[j, j] > a[best_j, best_j]):
                best_v = v
                best_j = j
        sub[d] = best_j
        used[best_j] = True
        val = best_v
    if m > 1:
        val = _lambda1(_minor(a, _sorted_copy(sub)), tol, max_sweeps)
    return val, _sorted_copy(sub)


@njit(cache=True, nogil=True)
def _next_combination(c, p):
    m = c.shape[0]
    i = m - 1
    while i >= 0 and c[i] == p - m + i:
        i -= 1
    if i < 0:
        return False
    c[i] += 1
    for j in range(i + 1, m):
        c[j] = c[j - 1] + 1
    return True


@njit(cache=True, nogil=True)
def enumerate_max(a, m, rtol, tol, max_sweeps):
    """Exhaustive search: max lambda1 over all m-subsets.

    Returns the lexicographically smallest subset whose value lies within the
    tie tolerance of the maximum, plus the number of subsets evaluated.
    """
    p = a.shape[0]
    c = np.arange(m).astype(np.int64)
    best = -np.inf
    count = 0
    while True:
        v = _lambda1(_minor(a, c), tol, max_sweeps)
        count += 1
        if v > best:
            best = v
        if not _next_combination(c, p):
            break
    thr = best - _tol(best, rtol)
    c = np.arange(m).astype(np.int64)
    while True:
        v = _lambda1(_minor(a, c), tol, max_sweeps)
        if v >= thr:
            return v, c.copy(), count
        if not _next_combination(c, p):
            break
    return best, c, count


@njit(cache=True, nogil=True)
def _row_tops(a, depth):
    # tops[i, r] = sum of the r largest |a_ij|, j != i, r = 0..depth
    p = a.shape[0]
    tops = np.zeros((p, depth + 1))
    if depth == 0:
        return tops
    buf = np.empty(depth)
    for i in range(p):
        nb = 0
        for j in range(p):
            if j == i:
                continue
            x = abs(a[i, j])
            if nb < depth:
                pos = nb
                nb += 1
            elif x > buf[depth - 1]:
                pos = depth - 1
            else:
                continue
            while pos > 0 and buf[pos - 1] < x:
                buf[pos] = buf[pos - 1]
                pos -= 1
            buf[pos] = x
        acc = 0.0
        for r in range(1, depth + 1):
            if r <= nb:
                acc += buf[r - 1]
            tops[i, r] = acc
    return tops


@njit(cache=True, nogil=True)
def _node_bound(a, sel, d, order, start, r, tops):
    """Gershgorin-type bound over all completions of sel[:d] by r picks from order[start:]."""
    p = order.shape[0]
    bound = -np.inf
    buf = np.empty(r)
    for ii in range(d):
        i = sel[ii]
        s = a[i, i]
        for ll in range(d):
            if ll != ii:
                s += abs(a[i, sel[ll]])
        nb = 0
        for jj in range(start, p):
            x = abs(a[i, order[jj]])
            if nb < r:
                pos = nb
                nb += 1
            elif x > buf[r - 1]:
                pos = r - 1
            else:
                continue
            while pos > 0 and buf[pos - 1] < x:
                buf[pos] = buf[pos - 1]
                pos -= 1
            buf[pos] = x
        for t in range(nb):
            s += buf[t]
        if s > bound:
            bound = s
    for jj in range(start, p):
        j = order[jj]
        s = a[j, j] + tops[j, r - 1]
        for ll in range(d):
            s += abs(a[j, sel[ll]])
        if s > bound:
            bound = s
    return bound


@njit(cache=True, nogil=True)
def _leaf_gersh(a, leaf):
    m = leaf.shape[0]
    g = -np.inf
    for ii in range(m):
        i = leaf[ii]
        s = a[i, i]
        for ll in range(m):
            if ll != ii:
                s += abs(a[i, leaf[ll]])
        if s > g:
            g = s
    return g


@njit(cache=True, nogil=True)
def bnb_max(a, m, init_val, init_sub, interlace_max, rtol, tol, max_sweeps):
    """Depth-first branch-and-bound for max lambda1 over m-subsets.

    Candidates are visited in order of decreasing diagonal entry.  Each node
    (chosen set P, remaining pool C) is bounded by a Gershgorin-type bound
    and, when |P|+|C| <= interlace_max, by lambda1 of the P+C minor
    (interlacing).  Leaves below a node with |P| = m-1 are screened against
    the incumbent held at the start of that batch.
    """
    p = a.shape[0]
    diag = np.empty(p)
    for i in range(p):
        diag[i] = a[i, i]
    order = np.argsort(-diag, kind="mergesort").astype(np.int64)
    tops = _row_tops(a, max(m - 2, 0))

    best = init_val
    best_sub = init_sub.copy()
    nodes = 0

    sel = np.empty(m, dtype=np.int64)
    nxt = np.zeros(m + 1, dtype=np.int64)
    leaf = np.empty(m, dtype=np.int64)
    d = 0
    while d >= 0:
        if d == m - 1:
            start = nxt[d]
            thr = best - _tol(best, rtol)
            for jj in range(start, p):
                for t in range(d):
                    leaf[t] = sel[t]
                leaf[d] = order[jj]
                if _leaf_gersh(a, leaf) < thr:
                    continue
                srt = _sorted_copy(leaf)
                nodes += 1
                v = _lambda1(_minor(a, srt), tol, max_sweeps)
                tb = _tol(best, rtol)
                if v > best + tb or (v >= best - tb and _lexless(srt, best_sub)):
                    best = v
                    best_sub = srt
            d -= 1
            continue
        jj = nxt[d]
        if jj > p - (m - d):
            d -= 1
            continue
        nxt[d] = jj + 1
        sel[d] = order[jj]
        start = jj + 1
        r = m - d - 1
        nodes += 1
        thr = best - _tol(best, rtol)
        bound = _node_bound(a, sel, d + 1, order, start, r, tops)
        if bound >= thr and d + 1 + (p - start) <= interlace_max:
            pool = np.empty(d + 1 + p - start, dtype=np.int64)
            for t in range(d + 1):
                pool[t] = sel[t]
            for t in range(start, p):
                pool[d + 1 + t - start] = order[t]
            lb = _lambda1(_minor(a, _sorted_copy(pool)), tol, max_sweeps)
            if lb < bound:
                bound = lb
        if bound < thr:
            continue
        d += 1
        nxt[d] = start
    return best, best_sub, nodes
