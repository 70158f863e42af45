"""Exact integer linear algebra: Smith normal form and invariant factors.

Everything here works on Python integers, so there is no overflow.  The
dense routine tracks unimodular transforms; the sparse routine only returns
invariant factors and is the workhorse for coboundary matrices, where
almost every pivot is a unit.
"""

from __future__ import annotations

from math import gcd


def _identity(n):
    return [[int(i == j) for j in range(n)] for i in range(n)]


def smith_normal_form(a, transforms: bool = True):
    """Smith normal form ``U @ A @ V = D`` of an integer matrix.

    Returns ``(U, D, V, Vinv)`` as lists of lists when ``transforms`` is set,
    otherwise just ``D``.  ``D`` is diagonal with non-negative entries, each
    dividing the next.
    """
    m = len(a)
    n = len(a[0]) if m else 0
    d = [[int(x) for x in row] for row in a]
    u = _identity(m) if transforms else None
    v = _identity(n) if transforms else None
    vinv = _identity(n) if transforms else None

    def swap_rows(i, j):
        d[i], d[j] = d[j], d[i]
        if transforms:
            u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in d:
            row[i], row[j] = row[j], row[i]
        if transforms:
            for row in v:
                row[i], row[j] = row[j], row[i]
            vinv[i], vinv[j] = vinv[j], vinv[i]

    def add_row(src, dst, c):  # row_dst += c * row_src
        if c == 0:
            return
        rs, rd = d[src], d[dst]
        for k in range(n):
            if rs[k]:
                rd[k] += c * rs[k]
        if transforms:
            us, ud = u[src], u[dst]
            for k in range(m):
                if us[k]:
                    ud[k] += c * us[k]

    def add_col(src, dst, c):  # col_dst += c * col_src
        if c == 0:
            return
        for row in d:
            if row[src]:
                row[dst] += c * row[src]
        if transforms:
            for row in v:
                if row[src]:
                    row[dst] += c * row[src]
            # inverse: row_src of Vinv -= c * row_dst of Vinv
            vs, vd = vinv[src], vinv[dst]
            for k in range(n):
                if vd[k]:
                    vs[k] -= c * vd[k]

    def negate_row(i):
        d[i] = [-x for x in d[i]]
        if transforms:
            u[i] = [-x for x in u[i]]

    t = 0
    while t < min(m, n):
        # pick the nonzero entry of least magnitude in the trailing block
        best = None
        for i in range(t, m):
            for j in range(t, n):
                x = d[i][j]
                if x and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
                    if best[0] == 1:
                        break
            if best is not None and best[0] == 1:
                break
        if best is None:
            break
        _, i, j = best
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            p = d[t][t]
            done = True
            for i in range(t + 1, m):
                if d[i][t]:
                    add_row(t, i, -(d[i][t] // p))
                    if d[i][t]:
                        done = False
            for j in range(t + 1, n):
                if d[t][j]:
                    add_col(t, j, -(d[t][j] // p))
                    if d[t][j]:
                        done = False
            if done:
                # divisibility of the remaining block
                bad = None
                for i in range(t + 1, m):
                    for j in range(t + 1, n):
                        if d[i][j] % p:
                            bad = i
                            break
                    if bad is not None:
                        break
                if bad is None:
                    break
                add_row(bad, t, 1)
                continue
            # move the smallest remainder into the pivot position
            best = None
            for i in range(t, m):
                if d[i][t] and (best is None or abs(d[i][t]) < best[0]):
                    best = (abs(d[i][t]), i, t)
            for j in range(t, n):
                if d[t][j] and (best is None or abs(d[t][j]) < best[0]):
                    best = (abs(d[t][j]), t, j)
            _, i, j = best
            swap_rows(t, i)
            swap_cols(t, j)
        if d[t][t] < 0:
            negate_row(t)
        t += 1
    if transforms:
        return u, d, v, vinv
    return d


def _diag_invariants(diag):
    """Normalize a list of nonzero diagonal entries into invariant factors."""
    vals = [abs(x) for x in diag if x]
    # repeated gcd/lcm sweeps give the divisibility chain
    for i in range(len(vals)):
        for j in range(i + 1, len(vals)):
            a, b = vals[i], vals[j]
            g = gcd(a, b)
            vals[i], vals[j] = g, a // g * b
    return sorted(vals)


def invariant_factors_dense(a):
    if not a or not a[0]:
        return []
    d = smith_normal_form(a, transforms=False)
    return _diag_invariants([d[i][i] for i in range(min(len(d), len(d[0])))])


def invariant_factors_sparse(rows, ncols: int | None = None):
    """Nonzero invariant factors of a sparse integer matrix.

    ``rows`` is a list of ``{column: value}`` dicts.  Unit pivots are
    eliminated greedily (a unimodular operation, so invariant factors are
    preserved); whatever remains goes through the dense Smith form.
    """
    rows = [dict(r) for r in rows if r]
    col_rows: dict = {}
    for ri, r in enumerate(rows):
        for c in r:
            col_rows.setdefault(c, set()).add(ri)
    alive = set(range(len(rows)))
    units = 0
    progress = True
    while progress:
        progress = False
        # rows ordered by length keep fill-in low
        for ri in sorted(alive, key=lambda k: (len(rows[k]), k)):
            if ri not in alive:
                continue
            r = rows[ri]
            if not r:
                alive.discard(ri)
                continue
            pc = None
            for c in sorted(r, key=lambda c: (len(col_rows[c]), c)):
                if r[c] in (1, -1):
                    pc = c
                    break
            if pc is None:
                continue
            pv = r[pc]
            for rj in list(col_rows[pc]):
                if rj == ri:
                    continue
                other = rows[rj]
                f = other[pc] * pv  # pv = +-1, so this is other/pv
                for c, val in r.items():
                    nv = other.get(c, 0) - f * val
                    if nv:
                        if c not in other:
                            col_rows[c].add(rj)
                        other[c] = nv
                    elif c in other:
                        del other[c]
                        col_rows[c].discard(rj)
                if not other:
                    alive.discard(rj)
            for c in r:
                col_rows[c].discard(ri)
            alive.discard(ri)
            units += 1
            progress = True
    rest = [rows[k] for k in sorted(alive) if rows[k]]
    if not rest:
        return [1] * units
    cols = sorted({c for r in rest for c in r})
    pos = {c: i for i, c in enumerate(cols)}
    dense = [[0] * len(cols) for _ in rest]
    for i, r in enumerate(rest):
        for c, val in r.items():
            dense[i][pos[c]] = val
    return [1] * units + invariant_factors_dense(dense)


def rank_sparse(rows) -> int:
    return len(invariant_factors_sparse(rows))


def matmul(a, b):
    n = len(b[0]) if b else 0
    return [[sum(x * b[k][j] for k, x in enumerate(row) if x) for j in range(n)] for row in a]


def rank_dense(a) -> int:
    """Rank over Q by fraction-free elimination."""
    m = [[int(x) for x in row] for row in a]
    if not m or not m[0]:
        return 0
    rows, cols = len(m), len(m[0])
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        for i in range(r + 1, rows):
            if m[i][c]:
                f, p = m[i][c], m[r][c]
                m[i] = [p * x - f * y for x, y in zip(m[i], m[r])]
                g = 0
                for x in m[i]:
                    g = gcd(g, x)
                if g > 1:
                    m[i] = [x // g for x in m[i]]
        r += 1
        if r == rows:
            break
    return r


_NP_LIMIT = 1 << 40


def smith_normal_form_np(a):
    """``U @ A @ V = D`` with int64 numpy arrays; returns (U, D, V, Vinv).

    Row and column sweeps are vectorized.  If any entry grows beyond 2^40 the
    computation is redone with the pure-Python routine, so the result is
    always exact.
    """
    import numpy as np

    A = np.array(a, dtype=np.int64).reshape(len(a), -1) if len(a) else np.zeros((0, 0), np.int64)
    m, n = A.shape
    U = np.eye(m, dtype=np.int64)
    V = np.eye(n, dtype=np.int64)
    Vi = np.eye(n, dtype=np.int64)

    def fallback():
        u, d, v, vi = smith_normal_form(np.asarray(a).tolist())
        return (np.array(u, dtype=object), np.array(d, dtype=object),
                np.array(v, dtype=object), np.array(vi, dtype=object))

    def swap(t, i, j):
        if i != t:
            A[[t, i]] = A[[i, t]]
            U[[t, i]] = U[[i, t]]
        if j != t:
            A[:, [t, j]] = A[:, [j, t]]
            V[:, [t, j]] = V[:, [j, t]]
            Vi[[t, j]] = Vi[[j, t]]

    t = 0
    while t < min(m, n):
        sub = A[t:, t:]
        nz = np.nonzero(sub)
        if nz[0].size == 0:
            break
        k = int(np.argmin(np.abs(sub[nz])))
        swap(t, int(nz[0][k]) + t, int(nz[1][k]) + t)
        while True:
            p = A[t, t]
            qc = A[t + 1:, t] // p
            if qc.any():
                A[t + 1:] -= np.outer(qc, A[t])
                U[t + 1:] -= np.outer(qc, U[t])
            qr = A[t, t + 1:] // p
            if qr.any():
                A[:, t + 1:] -= np.outer(A[:, t], qr)
                V[:, t + 1:] -= np.outer(V[:, t], qr)
                Vi[t] += qr @ Vi[t + 1:]
            if max(np.abs(A).max(initial=0), np.abs(U).max(initial=0),
                   np.abs(V).max(initial=0), np.abs(Vi).max(initial=0)) > _NP_LIMIT:
                return fallback()
            col = A[t + 1:, t]
            row = A[t, t + 1:]
            if col.any() or row.any():
                cands = [(abs(int(x)), t + 1 + i, t) for i, x in enumerate(col) if x]
                cands += [(abs(int(x)), t, t + 1 + j) for j, x in enumerate(row) if x]
                _, i, j = min(cands)
                swap(t, i, j)
                continue
            rest = A[t + 1:, t + 1:]
            bad = np.argwhere(rest % p != 0)
            if bad.size == 0:
                break
            i = int(bad[0][0]) + t + 1
            A[t] += A[i]
            U[t] += U[i]
        if A[t, t] < 0:
            A[t] = -A[t]
            U[t] = -U[t]
        t += 1
    return U, A, V, Vi
