"""Brute-force recomputation on the full rank-s lattice.

Nothing here reuses the reduced pipeline: the cube enumeration, the cube
weights, the boundary matrix and its reduction (a filtered column reduction
over Z, falling back to exact rational persistence plus a local Smith-form
routine) are all separate.  Only the graph, the lattice data (classes and
their distinguished representatives) and the result container are shared.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

import numpy as np

from . import _kernels as K
from ._config import MAX_CELLS, MAX_CORNER
from .cohomology import GradedModule
from .graph import PlumbingGraph, intersection_form
from .laufer import BadSet, artin_fundamental_cycle
from .lattice import SpinCClass, lattice_data


class OracleError(RuntimeError):
    pass


class ResourceError(OracleError):
    pass


# --- weights on a rectangle ------------------------------------------------------

def _chi_grid(form: np.ndarray, kpair: np.ndarray, lo, hi) -> np.ndarray:
    """chi_k(l) = -((l,l) + (k,l))/2 on the box lo <= l <= hi.

    ``kpair[j] = (k, E_j)`` must be integral.
    """
    s = form.shape[0]
    shape = tuple(int(h - l + 1) for l, h in zip(lo, hi))
    pts = np.indices(shape).reshape(s, -1).T + np.asarray(lo, np.int64)
    quad = np.einsum("ij,jk,ik->i", pts, form, pts)
    lin = pts @ kpair
    tot = quad + lin
    if np.any(tot % 2):
        raise OracleError("k is not characteristic")
    return (-tot // 2).reshape(shape)


@dataclass
class FullRectangle:
    """chi weights on R(lo, hi) in the full lattice L."""

    lo: tuple
    hi: tuple
    weights: np.ndarray

    @property
    def s(self) -> int:
        return len(self.lo)

    def n_cubes(self) -> int:
        n = 1
        for a, b in zip(self.lo, self.hi):
            n *= 2 * (b - a) + 1
        return n


def kr_pairing(g: PlumbingGraph, cls: SpinCClass, shift=None) -> np.ndarray:
    """(k, E_j) for k = k_r + 2 * shift."""
    lat = lattice_data(g)
    form = np.asarray(lat.rows, np.int64)
    kr = np.asarray(cls.kr_scaled, np.int64)
    kp = form @ kr
    if np.any(kp % lat.d):
        raise OracleError("k_r is not in L'")
    kp = kp // lat.d
    if shift is not None:
        kp = kp + 2 * (form @ np.asarray(shift, np.int64))
    return kp


def full_rectangle(g: PlumbingGraph, cls: SpinCClass, corner, shift=None) -> FullRectangle:
    """Weights chi_{k_r + 2l}(x) on R(-l, c - l) (l = ``shift``, default 0)."""
    s = g.s
    l = np.zeros(s, np.int64) if shift is None else np.asarray(shift, np.int64)
    c = np.asarray(corner, np.int64)
    lo = tuple(int(v) for v in -l)
    hi = tuple(int(v) for v in c - l)
    form = intersection_form(g).astype(np.int64)
    w = _chi_grid(form, kr_pairing(g, cls, shift), lo, hi)
    return FullRectangle(lo, hi, w)


# --- corner certificate on the full lattice ----------------------------------------------

def _strict_cycle(g: PlumbingGraph) -> np.ndarray:
    """Minimal integral l with (l, E_j) <= -1 for every j (ascent from 0)."""
    form = intersection_form(g).astype(np.int64)
    l = np.zeros(g.s, np.int64)
    p = np.zeros(g.s, np.int64)
    while True:
        bad = np.flatnonzero(p > -1)
        if bad.size == 0:
            return l
        j = int(bad[0])
        l[j] += 1
        p += form[:, j]


def _certified(form, pair, corner, per) -> bool:
    shape = np.asarray(per, np.int64) + 1
    steps = K.full_steps(form, pair, shape, np.asarray(corner, np.int64))
    return bool(K.monotone_reach(steps, shape, np.zeros_like(shape), shape - 1))


def _full_periods(g: PlumbingGraph, limit: float = 2e6) -> list:
    """Anti-nef integral cycles with positive entries, cheapest box first."""
    lat = lattice_data(g)
    cands = [np.asarray(artin_fundamental_cycle(g), np.int64)]
    for j in range(g.s):
        col = lat.dual_scaled[j]
        o = lat.d
        for v in col:
            o = gcd(o, v)
        o = lat.d // o
        cands.append(np.asarray([o * v // lat.d for v in col], np.int64))
    out, seen = [], set()
    for p in sorted(cands, key=lambda p: (float(np.prod(p + 1.0)), tuple(p))):
        if tuple(p) not in seen and float(np.prod(p + 1.0)) <= limit:
            seen.add(tuple(p))
            out.append(p)
    return out


def oracle_corner(g: PlumbingGraph, cls: SpinCClass, cap: int = MAX_CORNER) -> tuple:
    """A certified corner c for chi_{k_r} on the first quadrant.

    c is accepted when some monotone path c -> c + P never decreases chi,
    where P is an anti-nef integral cycle with positive entries (z_min, a
    multiple of some E_j^*, or the minimal strictly anti-nef cycle);
    translating the path by multiples of P never decreases chi either, so
    R(0, c) carries the whole lattice cohomology.  Among the points from
    which an admissible path reaches the first certified candidate, the one
    with the fewest cubes is returned.
    """
    lat = lattice_data(g)
    form = intersection_form(g).astype(np.int64)
    pair = np.asarray(cls.pair, np.int64)
    seed = np.asarray([max(0, (z - 2 * x) // lat.d)
                       for z, x in zip(lat.zk_scaled, cls.dist_scaled)], np.int64)
    pers = _full_periods(g)
    zmin = pers[0] if len(pers) else np.asarray(artin_fundamental_cycle(g), np.int64)
    strict = _strict_cycle(g)

    def ok(c, periods):
        return any(_certified(form, pair, c, p) for p in periods)

    cand = None
    for m in (0, 1, 2, 4, 8, 16):
        trial = seed + m * zmin
        if int(trial.max(initial=0)) > cap:
            break
        if ok(trial, pers):
            cand = trial
            break
    m = 1
    while cand is None:
        trial = seed + m * strict
        if int(trial.max(initial=0)) > cap:
            raise ResourceError(f"no certified oracle corner below the cap {cap}")
        if ok(trial, [strict]):
            cand = trial
        m *= 2
    shape = cand + 1
    if float(np.prod(shape.astype(np.float64))) <= 4e6:
        steps = K.full_steps(form, pair, shape, np.zeros(g.s, np.int64))
        good = K.backward_good(steps, shape, cand).reshape(tuple(shape))
        pts = np.argwhere(good)
        cubes = np.prod(2.0 * pts + 1, axis=1)
        keys = np.lexsort(tuple(pts[:, k] for k in range(g.s - 1, -1, -1)) + (cubes,))
        cand = pts[keys[0]]
    return tuple(int(v) for v in cand)


# --- cubes, boundary, reduction ---------------------------------------------------------------

def _enumerate_cubes(w: np.ndarray):
    """All cubes of the grid: (mask, base flat index, weight) arrays."""
    s = w.ndim
    shape = np.asarray(w.shape, np.int64)
    strides = np.ones(s, np.int64)
    for j in range(s - 2, -1, -1):
        strides[j] = strides[j + 1] * shape[j + 1]
    flat = w.reshape(-1)
    masks, bases, weights = [], [], []
    for mask in range(1 << s):
        sub = shape - np.asarray([(mask >> j) & 1 for j in range(s)], np.int64)
        if np.any(sub <= 0):
            continue
        idx = np.indices(tuple(sub)).reshape(s, -1).T
        base = idx @ strides
        best = flat[base].copy()
        members = [j for j in range(s) if (mask >> j) & 1]
        for sm in range(1, 1 << len(members)):
            off = sum(int(strides[members[t]]) for t in range(len(members)) if (sm >> t) & 1)
            np.maximum(best, flat[base + off], out=best)
        masks.append(np.full(base.size, mask, np.int64))
        bases.append(base)
        weights.append(best)
    return (np.concatenate(masks), np.concatenate(bases), np.concatenate(weights), strides)


def _filtered_boundary(w: np.ndarray):
    masks, bases, weights, strides = _enumerate_cubes(w)
    s = w.ndim
    dims = np.asarray([bin(int(m)).count("1") for m in range(1 << s)], np.int64)[masks]
    order = np.lexsort((bases, masks, dims, weights))
    pos = np.empty(order.size, np.int64)
    pos[order] = np.arange(order.size)
    npts = w.size
    lookup = np.full((1 << s, npts), -1, np.int64)
    lookup[masks, bases] = pos
    cols_r, cols_v, cols_c = [], [], []
    for mask in range(1, 1 << s):
        sel = np.flatnonzero(masks == mask)
        if sel.size == 0:
            continue
        members = [j for j in range(s) if (mask >> j) & 1]
        for t, j in enumerate(members):
            f = mask ^ (1 << j)
            sgn = 1 if t % 2 == 0 else -1
            up = lookup[f, bases[sel] + strides[j]]
            dn = lookup[f, bases[sel]]
            cols_c += [pos[sel], pos[sel]]
            cols_r += [up, dn]
            cols_v += [np.full(sel.size, sgn), np.full(sel.size, -sgn)]
    n = order.size
    if cols_c:
        c = np.concatenate(cols_c)
        r = np.concatenate(cols_r)
        v = np.concatenate(cols_v).astype(np.int64)
        if np.any(r < 0):
            raise OracleError("face lookup failed")
        o = np.lexsort((r, c))
        c, r, v = c[o], r[o], v[o]
    else:
        c = r = v = np.zeros(0, np.int64)
    ptr = np.zeros(n + 1, np.int64)
    np.cumsum(np.bincount(c, minlength=n), out=ptr[1:])
    return ptr, r, v, dims[order], weights[order]


def _rational_pairs(ptr, rows, vals, n):
    """Plain column reduction over Q; returns low[] (slow, exact)."""
    low = [-1] * n
    owner = {}
    red = []
    for j in range(n):
        col = {int(rows[p]): Fraction(int(vals[p])) for p in range(ptr[j], ptr[j + 1])}
        while col:
            lo = max(col)
            k = owner.get(lo)
            if k is None:
                break
            f = col[lo] / red[k][lo]
            for r, v in red[k].items():
                nv = col.get(r, 0) - f * v
                if nv:
                    col[r] = nv
                else:
                    col.pop(r, None)
        red.append(col)
        if col:
            lo = max(col)
            low[j] = lo
            owner[lo] = j
    return np.asarray(low, np.int64)


def _local_invariant_factors(mat: list) -> list:
    """Nonzero invariant factors by plain elimination (independent routine)."""
    a = [list(r) for r in mat if any(r)]
    out = []
    while a and a[0]:
        entries = [(abs(v), i, j) for i, r in enumerate(a) for j, v in enumerate(r) if v]
        if not entries:
            break
        _, i, j = min(entries)
        while True:
            p = a[i][j]
            changed = False
            for r in range(len(a)):
                if r != i and a[r][j]:
                    q = a[r][j] // p
                    a[r] = [x - q * y for x, y in zip(a[r], a[i])]
                    if a[r][j]:
                        changed = True
            for c in range(len(a[i])):
                if c != j and a[i][c]:
                    q = a[i][c] // p
                    for r in range(len(a)):
                        a[r][c] -= q * a[r][j]
                    if a[i][c]:
                        changed = True
            if not changed:
                bad = next(((r, c) for r in range(len(a)) for c in range(len(a[r]))
                            if r != i and c != j and a[r][c] % p), None)
                if bad is None:
                    break
                a[i] = [x + y for x, y in zip(a[i], a[bad[0]])]
                continue
            entries = [(abs(a[r][j]), r, j) for r in range(len(a)) if a[r][j]]
            entries += [(abs(a[i][c]), i, c) for c in range(len(a[i])) if a[i][c]]
            _, i, j = min(entries)
        out.append(abs(a[i][j]))
        a = [[x for c, x in enumerate(r) if c != j] for k, r in enumerate(a) if k != i]
        a = [r for r in a if any(r)]
    out.sort()
    # normalize to a divisibility chain
    for x in range(len(out)):
        for y in range(x + 1, len(out)):
            g_ = gcd(out[x], out[y])
            out[x], out[y] = g_, out[x] // g_ * out[y]
    return sorted(out)


def _torsion_levels(ptr, rows, vals, dims, weights, q):
    """(level, factors) of H^q on each distinct level (status-1 fallback)."""
    out = []
    for lev in np.unique(weights):
        cols = [j for j in range(len(dims)) if dims[j] == q and weights[j] <= lev]
        rws = sorted({int(rows[p]) for j in cols for p in range(ptr[j], ptr[j + 1])})
        if not cols:
            continue
        rp = {r: i for i, r in enumerate(rws)}
        mat = [[0] * len(cols) for _ in rws]
        for c, j in enumerate(cols):
            for p in range(ptr[j], ptr[j + 1]):
                mat[rp[int(rows[p])]][c] = int(vals[p])
        tors = tuple(f for f in _local_invariant_factors(mat) if f > 1)
        if tors:
            out.append((int(lev), tors))
    return tuple(out)


def modules_from_weights(w: np.ndarray) -> list:
    """Lattice cohomology modules (all q) of a weight grid, by persistence."""
    w = np.ascontiguousarray(w, dtype=np.int64)
    s = w.ndim
    if w.size * (1 << s) > 4 * MAX_CELLS:
        raise ResourceError("rectangle exceeds LATRED_MAX_CELLS")
    ptr, rows, vals, dims, weights = _filtered_boundary(w)
    n = dims.size
    low, status = K.persistence_z(ptr, rows, vals, dims, s)
    torsion = {q: () for q in range(s + 1)}
    if status:
        low = _rational_pairs(ptr, rows, vals, n)
        for q in range(1, s + 1):
            torsion[q] = _torsion_levels(ptr, rows, vals, dims, weights, q)
    is_low = np.zeros(n, bool)
    is_low[low[low >= 0]] = True
    agg = [dict() for _ in range(s + 1)]
    for j in range(n):
        if low[j] >= 0:
            i = low[j]
            b, e = int(weights[i]), int(weights[j]) - 1
            if e >= b:
                key = (b, e)
                agg[dims[i]][key] = agg[dims[i]].get(key, 0) + 1
        elif not is_low[j]:
            key = (int(weights[j]), None)
            agg[dims[j]][key] = agg[dims[j]].get(key, 0) + 1
    m_w = int(w.min())
    crit = tuple(int(v) for v in np.unique(weights))
    return [GradedModule(q, m_w, tuple((b, e, m) for (b, e), m in agg[q].items()),
                         torsion[q], crit) for q in range(s + 1)]


# --- public operations -------------------------------------------------------------------

def brute_x_cycle(g: PlumbingGraph, cls: SpinCClass, bad: BadSet, i, box) -> tuple:
    """Coordinatewise minimum of all x in [0, box] with x|bad = i and
    (x + l', E_j) <= 0 off the bad set."""
    s = g.s
    box = np.asarray(box, np.int64)
    i = [int(v) for v in i]
    if any(v < 0 for v in i):
        raise ValueError("i must be non-negative")
    lo = np.zeros(s, np.int64)
    hi = box.copy()
    for k, j in enumerate(bad.vertices):
        lo[j] = hi[j] = i[k]
    shape = tuple(int(h - l + 1) for l, h in zip(lo, hi))
    if any(v <= 0 for v in shape):
        raise OracleError("box too small")
    pts = np.indices(shape).reshape(s, -1).T + lo
    form = intersection_form(g).astype(np.int64)
    pair = pts @ form + np.asarray(cls.pair, np.int64)
    star = [j for j in range(s) if j not in bad.vertices]
    ok = np.all(pair[:, star] <= 0, axis=1) if star else np.ones(len(pts), bool)
    cands = pts[ok]
    if cands.size == 0:
        raise OracleError("box too small: no admissible cycle")
    m = cands.min(axis=0)
    if not np.any(np.all(cands == m, axis=1)):
        raise OracleError("admissible cycles have no minimum (contradiction)")
    return tuple(int(v) for v in m)


def full_lattice_cohomology(g: PlumbingGraph, cls: SpinCClass, corner=None, shift=None) -> list:
    """Modules of the full lattice on R(-l, c - l) with weights chi_{k_r + 2l}.

    With the default corner (certified for k_r) and no shift this is the
    lattice cohomology H^*(G, k_r).  Returns modules for q = 0..s-1.
    """
    if corner is None:
        corner = oracle_corner(g, cls)
    n = 1
    for c in corner:
        n *= 2 * int(c) + 1
    if n > MAX_CELLS:
        raise ResourceError(f"{n} cubes exceed LATRED_MAX_CELLS={MAX_CELLS}")
    rect = full_rectangle(g, cls, corner, shift)
    mods = modules_from_weights(rect.weights)
    top = mods[g.s]
    if top.intervals:
        raise OracleError("top-dimensional cohomology of a sublevel set is nonzero")
    return mods[:g.s]


def zeta_coefficient_bruteforce(g: PlumbingGraph, cls: SpinCClass, l) -> int:
    """sum_{I subset J} (-1)^{|I|+1} w(l, I) with w the max of chi_{k_r} on the cube."""
    s = g.s
    l = np.asarray(l, np.int64)
    rect = full_rectangle(g, cls, l + 1)
    w = rect.weights
    total = 0
    for mask in range(1 << s):
        members = [j for j in range(s) if (mask >> j) & 1]
        best = None
        for sm in range(1 << len(members)):
            v = l.copy()
            for t, j in enumerate(members):
                if (sm >> t) & 1:
                    v[j] += 1
            val = int(w[tuple(v)])
            best = val if best is None else max(best, val)
        total += (-1) ** (len(members) + 1) * best
    return total


def hilbert_point(g: PlumbingGraph, cls: SpinCClass) -> tuple:
    """Minimal l >= 0 with (l + l'_[k] - Z_K, E_j) <= -1 for all j."""
    lat = lattice_data(g)
    d = lat.d
    form = np.asarray(lat.rows, np.int64)
    shift = np.asarray(cls.dist_scaled, np.int64) - np.asarray(lat.zk_scaled, np.int64)
    l = np.maximum(0, -(shift // d))  # ceil(Z_K - l')
    while True:
        p = (form @ (d * l + shift))
        bad = np.flatnonzero(p > -d)
        if bad.size == 0:
            return tuple(int(v) for v in l)
        l[int(bad[0])] += 1


def chi_kr(g: PlumbingGraph, cls: SpinCClass, l) -> int:
    form = intersection_form(g).astype(np.int64)
    l = np.asarray(l, np.int64)
    tot = int(l @ form @ l) + int(l @ kr_pairing(g, cls))
    return -tot // 2


def modules_equal(a, b) -> bool:
    """Degree-by-degree equality (ranks, torsion, U-ranks) of module lists.

    Missing degrees count as zero modules.
    """
    n = max(len(a), len(b))
    for q in range(n):
        sa = a[q].signature()[1:] if q < len(a) else ((), ())
        sb = b[q].signature()[1:] if q < len(b) else ((), ())
        if sa != sb:
            return False
    return True


def full_eu(g: PlumbingGraph, cls: SpinCClass) -> int:
    """eu of the full-lattice cohomology: -min(w) + sum_q (-1)^q rank H^q_red."""
    mods = full_lattice_cohomology(g, cls)
    m_w = mods[0].m_w
    return -m_w + sum((-1) ** q * m.reduced_rank for q, m in enumerate(mods))


def hilbert_identity(g: PlumbingGraph, cls: SpinCClass | None = None, l=None):
    """Both sides of: sum over l-bar not >= l of p_{l'_[k] + l-bar} = chi_{k_r}(l) + eu.

    ``l`` defaults to ``hilbert_point`` (l + l'_[k] - Z_K strictly inside the
    Lipman cone).  The left side is sum over nonempty K of
    (-1)^{|K|+1} S_K with S_K the sum of p_{l'} over the class of l'_[k]
    with l'_k < (l'_[k] + l)_k for k in K; S_K is a finite sum of the
    K-projected class series.  The right side uses the brute-force
    cohomology.  Without ``cls`` every class is checked and a dict
    index -> (lhs, rhs) is returned.
    """
    import itertools
    from .series import projected_series
    lat = lattice_data(g)
    d = lat.d
    todo = [cls] if cls is not None else lat.classes()
    out = {}
    for c in todo:
        lc = hilbert_point(g, c) if l is None else tuple(int(v) for v in l)
        off = [(c.dist_scaled[j] - c.rep_scaled[j]) // d + lc[j] for j in range(g.s)]
        lhs = 0
        for r in range(1, g.s + 1):
            for sub in itertools.combinations(range(g.s), r):
                box = tuple(off[j] for j in sub)
                if min(box) <= 0:
                    continue
                z, classes = projected_series(g, sub, box)
                h = [cc.index for cc in classes].index(c.index)
                lhs += (-1) ** (r + 1) * int(z[h].sum())
        out[c.index] = (lhs, chi_kr(g, c, lc) + full_eu(g, c))
    return out[cls.index] if cls is not None else out
