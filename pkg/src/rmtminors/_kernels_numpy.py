"""Pure-numpy kernels, vectorized across batches of small matrices.

Same signatures and semantics as ``_kernels_numba``.  Rotation arithmetic is
written element-for-element like the compiled path, so results agree to
rounding of the convergence test.
"""

import itertools

import numpy as np

NAME = "numpy"

_U53 = 2.0**-52


def _offnorm(a):
    k = a.shape[-1]
    iu, ju = np.triu_indices(k, 1)
    return np.sqrt(2.0 * np.sum(a[:, iu, ju] ** 2, axis=1))


def _jacobi_batch(a, v, tol, max_sweeps):
    """In-place cyclic Jacobi on a (B, k, k) stack; v is (B, k, k) or None."""
    b, k, _ = a.shape
    thresh = tol * (1.0 + np.sqrt(np.sum(a * a, axis=(1, 2))))
    sweeps = np.zeros(b, dtype=np.int64)
    off = _offnorm(a) if k > 1 else np.zeros(b)
    active = off >= thresh
    while active.any():
        idx = np.nonzero(active & (sweeps < max_sweeps))[0]
        if idx.size == 0:
            break
        sub = a[idx]
        vs = v[idx] if v is not None else None
        for p in range(k - 1):
            for q in range(p + 1, k):
                apq = sub[:, p, q]
                nz = apq != 0.0
                if not nz.any():
                    continue
                app = sub[:, p, p].copy()
                aqq = sub[:, q, q].copy()
                apq = apq.copy()
                safe = np.where(nz, apq, 1.0)
                theta = (aqq - app) / (2.0 * safe)
                big = np.abs(theta) > 1e150
                with np.errstate(over="ignore", invalid="ignore"):
                    t = 1.0 / (np.abs(theta) + np.sqrt(theta * theta + 1.0))
                t = np.where(theta < 0.0, -t, t)
                t = np.where(big, 0.5 / np.where(big, theta, 1.0), t)
                t = np.where(nz, t, 0.0)
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                g = sub[:, :, p].copy()
                h = sub[:, :, q].copy()
                ncp = c[:, None] * g - s[:, None] * h
                ncq = s[:, None] * g + c[:, None] * h
                sub[:, :, p] = ncp
                sub[:, :, q] = ncq
                sub[:, p, :] = ncp
                sub[:, q, :] = ncq
                sub[:, p, p] = np.where(nz, app - t * apq, app)
                sub[:, q, q] = np.where(nz, aqq + t * apq, aqq)
                sub[:, p, q] = np.where(nz, 0.0, apq)
                sub[:, q, p] = sub[:, p, q]
                if vs is not None:
                    gv = vs[:, :, p].copy()
                    hv = vs[:, :, q].copy()
                    vs[:, :, p] = c[:, None] * gv - s[:, None] * hv
                    vs[:, :, q] = s[:, None] * gv + c[:, None] * hv
        a[idx] = sub
        if vs is not None:
            v[idx] = vs
        sweeps[idx] += 1
        off[idx] = _offnorm(sub)
        active = off >= thresh
    return sweeps, off


def jacobi_eigh(a, want_vectors, tol, max_sweeps):
    k = a.shape[0]
    w = np.array(a, dtype=np.float64)[None].copy()
    v = np.eye(k)[None].copy() if want_vectors else None
    sweeps, off = _jacobi_batch(w, v, tol, max_sweeps)
    d = np.diagonal(w[0]).copy()
    order = np.argsort(-d, kind="stable")
    if want_vectors:
        return d[order], v[0][:, order].copy(), int(sweeps[0]), float(off[0])
    return d[order], np.empty((0, 0)), int(sweeps[0]), float(off[0])


def lambda1_batch(mats, tol, max_sweeps):
    w = np.array(mats, dtype=np.float64, copy=True)
    if w.shape[0] == 0:
        return np.empty(0)
    _jacobi_batch(w, None, tol, max_sweeps)
    return np.max(np.diagonal(w, axis1=1, axis2=2), axis=1)


def polar_fill(raw, out, start):
    n = out.shape[0]
    need = n - start
    nraw = raw.shape[0] - raw.shape[0] % 2
    if need <= 0 or nraw == 0:
        return start, 0
    pairs = raw[:nraw].reshape(-1, 2)
    u = (pairs >> np.uint64(11)).astype(np.float64) * _U53 - 1.0
    u1 = u[:, 0]
    u2 = u[:, 1]
    s = u1 * u1 + u2 * u2
    acc = np.nonzero((s < 1.0) & (s != 0.0))[0]
    sa = s[acc]
    f = np.sqrt(-2.0 * np.log(sa) / sa)
    vals = np.empty(2 * acc.size)
    vals[0::2] = u1[acc] * f
    vals[1::2] = u2[acc] * f
    take = min(need, vals.size)
    out[start:start + take] = vals[:take]
    if take == need:
        used = 2 * (int(acc[(take - 1) // 2]) + 1)
    else:
        used = nraw
    return start + take, used


def _minors(a, idx):
    return a[idx[:, :, None], idx[:, None, :]]


def greedy_max(a, m, tol, max_sweeps):
    p = a.shape[0]
    diag = np.diagonal(a)
    first = int(np.argmax(diag))
    sub = [first]
    val = float(a[first, first])
    for _ in range(1, m):
        cand = np.array([j for j in range(p) if j not in sub], dtype=np.int64)
        idx = np.empty((cand.size, len(sub) + 1), dtype=np.int64)
        idx[:, :-1] = sub
        idx[:, -1] = cand
        idx.sort(axis=1)
        vals = lambda1_batch(_minors(a, idx), tol, max_sweeps)
        # exact ties go to the larger diagonal entry, then the smaller index
        k = int(np.lexsort((-diag[cand], -vals))[0])
        sub.append(int(cand[k]))
        val = float(vals[k])
    return val, np.array(sorted(sub), dtype=np.int64)


def _combination_chunks(p, m, size=65536):
    it = itertools.combinations(range(p), m)
    while True:
        chunk = list(itertools.islice(it, size))
        if not chunk:
            return
        yield np.array(chunk, dtype=np.int64).reshape(len(chunk), m)


def enumerate_max(a, m, rtol, tol, max_sweeps):
    p = a.shape[0]
    vals = []
    for idx in _combination_chunks(p, m):
        vals.append(lambda1_batch(_minors(a, idx), tol, max_sweeps))
    vals = np.concatenate(vals)
    best = float(vals.max())
    thr = best - rtol * (1.0 + abs(best))
    pos = int(np.nonzero(vals >= thr)[0][0])
    sub = np.array(next(itertools.islice(itertools.combinations(range(p), m), pos, None)),
                   dtype=np.int64)
    return float(vals[pos]), sub, int(vals.size)


def _row_tops(a, depth):
    p = a.shape[0]
    tops = np.zeros((p, depth + 1))
    if depth == 0 or p < 2:
        return tops
    absa = np.abs(a)
    np.fill_diagonal(absa, -np.inf)
    srt = -np.sort(-absa, axis=1)[:, :depth]
    srt = np.where(np.isfinite(srt), srt, 0.0)
    tops[:, 1:srt.shape[1] + 1] = np.cumsum(srt, axis=1)
    if srt.shape[1] < depth:
        tops[:, srt.shape[1] + 1:] = tops[:, [srt.shape[1]]]
    return tops


def _node_bound(a, absa, sel, order, start, r, tops):
    pool = order[start:]
    bound = -np.inf
    d = len(sel)
    for ii in range(d):
        i = sel[ii]
        s = a[i, i] + sum(absa[i, sel[ll]] for ll in range(d) if ll != ii)
        row = absa[i, pool]
        if row.size > r:
            top = -np.sort(-row)[:r]
        else:
            top = -np.sort(-row)
        s += float(np.sum(top))
        bound = max(bound, s)
    if pool.size:
        cs = np.diagonal(a)[pool] + tops[pool, r - 1] + absa[np.ix_(pool, sel)].sum(axis=1)
        bound = max(bound, float(cs.max()))
    return bound


def bnb_max(a, m, init_val, init_sub, interlace_max, rtol, tol, max_sweeps):
    p = a.shape[0]
    absa = np.abs(a)
    order = np.argsort(-np.diagonal(a), kind="stable").astype(np.int64)
    tops = _row_tops(a, max(m - 2, 0))
    best = float(init_val)
    best_sub = np.array(init_sub, dtype=np.int64)
    nodes = 0

    def tolf(v):
        return rtol * (1.0 + abs(v))

    def leaves(sel, start):
        nonlocal best, best_sub, nodes
        pool = order[start:]
        if pool.size == 0:
            return
        idx = np.empty((pool.size, m), dtype=np.int64)
        idx[:, :-1] = sel
        idx[:, -1] = pool
        thr = best - tolf(best)
        mins = _minors(a, idx)
        offsum = np.abs(mins).sum(axis=2) - np.abs(np.diagonal(mins, axis1=1, axis2=2))
        g = np.max(np.diagonal(mins, axis1=1, axis2=2) + offsum, axis=1)
        keep = np.nonzero(g >= thr)[0]
        if keep.size == 0:
            return
        srt = np.sort(idx[keep], axis=1)
        vals = lambda1_batch(_minors(a, srt), tol, max_sweeps)
        nodes += int(keep.size)
        for v, s in zip(vals.tolist(), srt):
            tb = tolf(best)
            if v > best + tb or (v >= best - tb and tuple(s) < tuple(best_sub)):
                best = v
                best_sub = s.copy()

    def visit(sel, start):
        nonlocal nodes
        d = len(sel)
        if d == m - 1:
            leaves(sel, start)
            return
        for jj in range(start, p - (m - d) + 1):
            child = sel + [int(order[jj])]
            nxt = jj + 1
            r = m - d - 1
            nodes += 1
            thr = best - tolf(best)
            bound = _node_bound(a, absa, child, order, nxt, r, tops)
            if bound >= thr and len(child) + (p - nxt) <= interlace_max:
                pool = np.sort(np.concatenate([np.array(child, dtype=np.int64), order[nxt:]]))
                lb = float(lambda1_batch(_minors(a, pool[None]), tol, max_sweeps)[0])
                bound = min(bound, lb)
            if bound < thr:
                continue
            visit(child, nxt)

    visit([], 0)
    return best, best_sub, nodes
