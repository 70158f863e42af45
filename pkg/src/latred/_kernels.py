"""Hot loops.

Every kernel is written as plain numpy/Python so that the very same body is
the fallback implementation; with numba available (and LATRED_DISABLE_NUMBA
unset) it is compiled with ``numba.njit``.
"""

import numpy as np

from ._config import USE_NUMBA

if USE_NUMBA:
    import numba as nb

    def jit(fn):
        return nb.njit(cache=True)(fn)
else:  # pragma: no cover - exercised via subprocess in the tests
    def jit(fn):
        return fn


@jit
def _strides(shape):
    k = shape.shape[0]
    st = np.ones(k, np.int64)
    for j in range(k - 2, -1, -1):
        st[j] = st[j + 1] * shape[j + 1]
    return st


@jit
def xcycle_table(form, pair, bad, star, shape, max_steps):
    """Fill x(i), w(i) and (x(i)+l', E_j) for all i in the box ``[0, shape)``.

    Points are visited in lexicographic order; x(i) is obtained by a Laufer
    ascent over the vertices in ``star`` from x(i - 1_k) + E_{bad[k]} where
    k is the first coordinate with i_k > 0.  Returns ``(x, w, p, status)``;
    status 1 means an ascent exceeded ``max_steps``.
    """
    s = form.shape[0]
    nu = bad.shape[0]
    st = _strides(shape)
    total = 1
    for k in range(nu):
        total *= shape[k]
    xs = np.zeros((total, s), np.int64)
    ws = np.zeros(total, np.int64)
    ps = np.zeros((total, s), np.int64)
    for j in range(s):
        ps[0, j] = pair[j]
    # x(0) = 0 only if l' already satisfies the star conditions (true for l'_[k])
    idx = np.zeros(nu, np.int64)
    for flat in range(1, total):
        r = flat
        for k in range(nu):
            idx[k] = r // st[k]
            r -= idx[k] * st[k]
        k0 = 0
        while idx[k0] == 0:
            k0 += 1
        pred = flat - st[k0]
        b = bad[k0]
        for j in range(s):
            xs[flat, j] = xs[pred, j]
            ps[flat, j] = ps[pred, j] + form[j, b]
        xs[flat, b] += 1
        ws[flat] = ws[pred] + 1 - ps[pred, b]
        steps = 0
        while True:
            jj = -1
            for t in range(star.shape[0]):
                if ps[flat, star[t]] > 0:
                    jj = star[t]
                    break
            if jj < 0:
                break
            # chi increment of adding E_jj is 1 - p_jj
            ws[flat] += 1 - ps[flat, jj]
            xs[flat, jj] += 1
            for j in range(s):
                ps[flat, j] += form[j, jj]
            steps += 1
            if steps > max_steps:
                return xs, ws, ps, 1
    return xs, ws, ps, 0


@jit
def reduced_steps(w, shape):
    """Bitmask of admissible steps: bit k set at i iff w(i+1_k) >= w(i)."""
    nu = shape.shape[0]
    st = _strides(shape)
    total = w.shape[0]
    out = np.zeros(total, np.int64)
    idx = np.zeros(nu, np.int64)
    for flat in range(total):
        r = flat
        for k in range(nu):
            idx[k] = r // st[k]
            r -= idx[k] * st[k]
        m = 0
        for k in range(nu):
            if idx[k] + 1 < shape[k] and w[flat + st[k]] >= w[flat]:
                m |= 1 << k
        out[flat] = m
    return out


@jit
def full_steps(form, pair, shape, origin):
    """Admissible steps for chi_{k_r} on the box ``origin + [0, shape)``.

    Adding E_k to l does not decrease chi iff (l + l', E_k) <= 1.
    """
    s = shape.shape[0]
    st = _strides(shape)
    total = 1
    for k in range(s):
        total *= shape[k]
    out = np.zeros(total, np.int64)
    idx = np.zeros(s, np.int64)
    for flat in range(total):
        r = flat
        for k in range(s):
            idx[k] = r // st[k] + origin[k]
            r -= (idx[k] - origin[k]) * st[k]
        m = 0
        for k in range(s):
            if idx[k] - origin[k] + 1 < shape[k]:
                v = pair[k]
                for j in range(s):
                    v += form[k, j] * idx[j]
                if v <= 1:
                    m |= 1 << k
        out[flat] = m
    return out


@jit
def monotone_reach(steps, shape, lo, hi):
    """Is there a monotone admissible lattice path from ``lo`` to ``hi``?"""
    k = shape.shape[0]
    st = _strides(shape)
    sub = np.empty(k, np.int64)
    total = 1
    for j in range(k):
        sub[j] = hi[j] - lo[j] + 1
        total *= sub[j]
    sst = _strides(sub)
    reach = np.zeros(total, np.bool_)
    reach[0] = True
    idx = np.zeros(k, np.int64)
    for f in range(total):
        if not reach[f]:
            continue
        r = f
        g = 0
        for j in range(k):
            idx[j] = r // sst[j]
            r -= idx[j] * sst[j]
            g += (idx[j] + lo[j]) * st[j]
        m = steps[g]
        for j in range(k):
            if idx[j] + 1 < sub[j] and (m >> j) & 1:
                reach[f + sst[j]] = True
    return reach[total - 1]


@jit
def backward_good(steps, shape, corner):
    """Points p <= corner from which an admissible path reaches ``corner``."""
    k = shape.shape[0]
    st = _strides(shape)
    sub = np.empty(k, np.int64)
    total = 1
    for j in range(k):
        sub[j] = corner[j] + 1
        total *= sub[j]
    sst = _strides(sub)
    good = np.zeros(total, np.bool_)
    good[total - 1] = True
    idx = np.zeros(k, np.int64)
    for f in range(total - 2, -1, -1):
        r = f
        g = 0
        for j in range(k):
            idx[j] = r // sst[j]
            r -= idx[j] * sst[j]
            g += idx[j] * st[j]
        m = steps[g]
        for j in range(k):
            if idx[j] < corner[j] and (m >> j) & 1 and good[f + sst[j]]:
                good[f] = True
                break
    return good


@jit
def h0_sweep(w, shape):
    """Zero-dimensional sublevel persistence on a grid (elder rule).

    Returns per-vertex arrays ``(death, merged_into)``: a vertex that starts
    a component records the level at which the component merges into an
    older one (or a huge sentinel if it survives) and the surviving
    component's birth vertex.  Non-birth vertices have death = -huge.
    """
    nu = shape.shape[0]
    st = _strides(shape)
    total = w.shape[0]
    order = np.argsort(w, kind="mergesort")
    rank = np.empty(total, np.int64)
    for t in range(total):
        rank[order[t]] = t
    parent = np.arange(total)
    root_birth = np.arange(total)  # birth vertex of the component rooted here
    sentinel = np.int64(1) << 62
    death = np.full(total, -sentinel, np.int64)
    merged = np.full(total, -1, np.int64)
    idx = np.zeros(nu, np.int64)
    for t in range(total):
        v = order[t]
        death[v] = sentinel
        r = v
        for k in range(nu):
            idx[k] = r // st[k]
            r -= idx[k] * st[k]
        for k in range(nu):
            for sgn in (-1, 1):
                c = idx[k] + sgn
                if c < 0 or c >= shape[k]:
                    continue
                u = v + sgn * st[k]
                if rank[u] > t:
                    continue
                # find roots
                a = v
                while parent[a] != a:
                    parent[a] = parent[parent[a]]
                    a = parent[a]
                b = u
                while parent[b] != b:
                    parent[b] = parent[parent[b]]
                    b = parent[b]
                if a == b:
                    continue
                ba = root_birth[a]
                bb = root_birth[b]
                if rank[ba] < rank[bb]:
                    old, young, oroot, yroot = ba, bb, a, b
                else:
                    old, young, oroot, yroot = bb, ba, b, a
                death[young] = w[v]
                merged[young] = old
                parent[yroot] = oroot
                root_birth[oroot] = old
    for t in range(total):
        if death[t] == w[t]:
            death[t] = -sentinel  # born and absorbed on the same level
    return death, merged


@jit
def _merge_cols(r1, c1, r2, c2, f):
    """Sorted sparse column r1/c1 minus f times r2/c2."""
    n1 = r1.shape[0]
    n2 = r2.shape[0]
    ro = np.empty(n1 + n2, np.int64)
    co = np.empty(n1 + n2, np.int64)
    i = 0
    j = 0
    k = 0
    while i < n1 or j < n2:
        if j >= n2 or (i < n1 and r1[i] < r2[j]):
            ro[k] = r1[i]
            co[k] = c1[i]
            i += 1
            k += 1
        elif i >= n1 or r2[j] < r1[i]:
            ro[k] = r2[j]
            co[k] = -f * c2[j]
            j += 1
            k += 1
        else:
            v = c1[i] - f * c2[j]
            if v != 0:
                ro[k] = r1[i]
                co[k] = v
                k += 1
            i += 1
            j += 1
    return ro[:k], co[:k]


@jit
def persistence_z(ptr, rows, vals, dims, maxdim):
    """Column reduction of a filtered boundary matrix over Z.

    Columns are cells in filtration order; column j has entries
    ``rows[ptr[j]:ptr[j+1]]`` (sorted) with coefficients ``vals``.  Only unit
    pivots are accepted; if a reduced column ends on a non-unit entry the
    status is 1 and the caller must fall back to an exact Smith-form route.
    Returns ``(low, status)`` with ``low[j] = -1`` for zero columns.
    """
    n = dims.shape[0]
    low = np.full(n, -1, np.int64)
    pivot_col = np.full(n, -1, np.int64)
    cleared = np.zeros(n, np.bool_)
    cap = max(16, 2 * rows.shape[0])
    buf_r = np.empty(cap, np.int64)
    buf_c = np.empty(cap, np.int64)
    used = 0
    start = np.zeros(n, np.int64)
    length = np.zeros(n, np.int64)
    status = 0
    for q in range(maxdim, 0, -1):
        for j in range(n):
            if dims[j] != q or cleared[j]:
                continue
            r = rows[ptr[j]:ptr[j + 1]].copy()
            c = vals[ptr[j]:ptr[j + 1]].copy()
            while r.shape[0] > 0:
                lo = r[r.shape[0] - 1]
                k = pivot_col[lo]
                if k < 0:
                    break
                rk = buf_r[start[k]:start[k] + length[k]]
                ck = buf_c[start[k]:start[k] + length[k]]
                f = c[c.shape[0] - 1] * ck[ck.shape[0] - 1]  # pivot is +-1
                r, c = _merge_cols(r, c, rk, ck, f)
            if r.shape[0] == 0:
                continue
            lo = r[r.shape[0] - 1]
            if c[c.shape[0] - 1] != 1 and c[c.shape[0] - 1] != -1:
                status = 1
                return low, status
            low[j] = lo
            pivot_col[lo] = j
            cleared[lo] = True
            m = r.shape[0]
            if used + m > cap:
                while used + m > cap:
                    cap *= 2
                nr = np.empty(cap, np.int64)
                nc = np.empty(cap, np.int64)
                nr[:used] = buf_r[:used]
                nc[:used] = buf_c[:used]
                buf_r = nr
                buf_c = nc
            buf_r[used:used + m] = r
            buf_c[used:used + m] = c
            start[j] = used
            length[j] = m
            used += m
    return low, status


@jit
def zeta_convolve(z, exps, target, shift, order, box):
    """Multiply a projected class series by prod_j (1 - t^{g_j})^{exps[j]}.

    ``z`` has shape (nclass, prod(box)); state (h, i) stands for the monomial
    of class h with integer coordinates i (relative to the class offset).
    ``target[j, h]`` is the class of h + g_j and ``shift[j, h]`` the integer
    coordinate increment.  ``order`` lists flat states by increasing scaled
    total degree, which every shift strictly increases.  Monomials leaving
    the box are dropped; the box is downward closed, so this is exact.
    """
    nh = z.shape[0]
    k = box.shape[0]
    st = _strides(box)
    npts = z.shape[1]
    nstates = nh * npts
    idx = np.zeros(k, np.int64)
    for j in range(exps.shape[0]):
        e = exps[j]
        if e == 0:
            continue
        # precompute destination of every state under this shift
        dest = np.full(nstates, -1, np.int64)
        for h in range(nh):
            h2 = target[j, h]
            for f in range(npts):
                r = f
                g = 0
                ok = True
                for t in range(k):
                    idx[t] = r // st[t]
                    r -= idx[t] * st[t]
                    v = idx[t] + shift[j, h, t]
                    if v >= box[t]:
                        ok = False
                        break
                    g += v * st[t]
                if ok:
                    dest[h * npts + f] = h2 * npts + g
        flat = z.reshape(nstates)
        if e > 0:
            for _ in range(e):
                # multiply by (1 - t^g): go from high to low degree
                for t in range(nstates - 1, -1, -1):
                    sidx = order[t]
                    dd = dest[sidx]
                    if dd >= 0:
                        flat[dd] -= flat[sidx]
        else:
            for _ in range(-e):
                # divide by (1 - t^g): forward propagation in degree order
                for t in range(nstates):
                    sidx = order[t]
                    dd = dest[sidx]
                    if dd >= 0:
                        flat[dd] += flat[sidx]
    return z


@jit
def prefix_pivots(ptr, rows, vals, order, rowkeep):
    """Left-to-right integral column reduction for prefix ranks.

    Columns are taken in the sequence ``order``; entries in rows with
    ``rowkeep[row] == 0`` are ignored.  Returns ``(nonzero, status)`` where
    ``nonzero[t]`` tells whether column ``order[t]`` stays nonzero after
    reduction by the earlier ones, so the rank of the first t columns is
    ``nonzero[:t].sum()``.  Reduction only subtracts integer multiples of
    earlier columns with a +-1 pivot.  Status 0 means every pivot was a unit,
    so all prefix submatrices have trivial invariant factors; status 1 flags
    a non-unit pivot, and the caller must redo the computation exactly.
    """
    n = order.shape[0]
    nrows = rowkeep.shape[0]
    nonzero = np.zeros(n, np.bool_)
    piv = np.full(nrows, -1, np.int64)
    cap = 64
    for t in range(n):
        c = order[t]
        cap += ptr[c + 1] - ptr[c]
    store_r = np.empty(cap, np.int64)
    store_v = np.empty(cap, np.int64)
    st_start = np.zeros(n, np.int64)
    st_len = np.zeros(n, np.int64)
    used = 0
    status = 0
    dense = np.zeros(nrows, np.int64)
    touched = np.empty(nrows, np.int64)
    for t in range(n):
        c = order[t]
        nt = 0
        for p in range(ptr[c], ptr[c + 1]):
            r = rows[p]
            if rowkeep[r]:
                if dense[r] == 0:
                    touched[nt] = r
                    nt += 1
                dense[r] += vals[p]
        while True:
            lo = -1
            for a in range(nt):
                r = touched[a]
                if dense[r] != 0 and r > lo:
                    lo = r
            if lo < 0:
                break
            k = piv[lo]
            if k < 0:
                break
            pv = store_v[st_start[k] + st_len[k] - 1]
            if pv != 1 and pv != -1:
                break
            f = dense[lo] * pv
            for a in range(st_start[k], st_start[k] + st_len[k]):
                r = store_r[a]
                if dense[r] == 0:
                    # r might be in touched already with a cancelled value
                    found = False
                    for b in range(nt):
                        if touched[b] == r:
                            found = True
                            break
                    if not found:
                        touched[nt] = r
                        nt += 1
                dense[r] -= f * store_v[a]
        # collect the reduced column, sorted by row
        m = 0
        for a in range(nt):
            if dense[touched[a]] != 0:
                m += 1
        if m > 0:
            nonzero[t] = True
            if used + m > cap:
                while used + m > cap:
                    cap *= 2
                nr = np.empty(cap, np.int64)
                nv = np.empty(cap, np.int64)
                nr[:used] = store_r[:used]
                nv[:used] = store_v[:used]
                store_r = nr
                store_v = nv
            tmp = np.empty(m, np.int64)
            b = 0
            for a in range(nt):
                if dense[touched[a]] != 0:
                    tmp[b] = touched[a]
                    b += 1
            tmp.sort()
            for a in range(m):
                store_r[used + a] = tmp[a]
                store_v[used + a] = dense[tmp[a]]
            st_start[t] = used
            st_len[t] = m
            used += m
            lo = tmp[m - 1]
            if piv[lo] >= 0:
                status = 1  # stuck on a non-unit pivot
            else:
                piv[lo] = t
            if dense[lo] != 1 and dense[lo] != -1:
                status = 1
        for a in range(nt):
            dense[touched[a]] = 0
    return nonzero, status
