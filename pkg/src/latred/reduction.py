"""The reduced weighted lattice over the bad vertices, on a finite rectangle.

Rectangle sufficiency is certified combinatorially.  Let T be a corner and
P = phi(l) the projection of an integral cycle l in the cone spanned by the
E_j^* of the bad vertices: l is anti-nef, orthogonal to every non-bad vertex
and x(i + P) = x(i) + l.  If there is a monotone path
from T to T + P along which w-bar never decreases, then repeating it shifted
by multiples of P gives an infinite such path (the increments only grow
under the shift), and along it the rectangles R(0, T_n) retract onto
R(0, T) without raising weights, because the increment in direction j is
smallest at the corner of each face.  Hence H^*(R(0, T)) = H^* of the whole
quadrant.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import itertools
from math import gcd

import numpy as np

from . import _kernels as K
from ._config import MAX_CORNER
from .graph import PlumbingGraph
from .lattice import LatticeData, SpinCClass, lattice_data
from .laufer import BadSet, XCycleCache


class StabilizationError(RuntimeError):
    pass


def _dual_order(lat: LatticeData, j: int) -> int:
    g = lat.d
    for v in lat.dual_scaled[j]:
        g = gcd(g, v)
    return lat.d // g


def _proj(lat: LatticeData, bad: BadSet, coeffs):
    """phi(sum_k coeffs[k] E_{j_k}^*) for an integral combination."""
    out = []
    for b in bad.vertices:
        t = sum(c * lat.dual_scaled[j][b] for c, j in zip(coeffs, bad.vertices))
        out.append(t // lat.d)
    return tuple(out)


_PERIODS: dict = {}


def periods(lat: LatticeData, bad: BadSet) -> list:
    """Candidate periods P = phi(l), cheapest first; the last one is strict.

    Each l is an integral combination of the E_j^* over bad vertices j, so it
    is orthogonal to the other vertices and x(i + P) = x(i) + l.  For the
    single-vertex periods the increments in the remaining bad directions are
    translation invariant; the final period pairs strictly negatively with
    every bad vertex, so translating by it raises every increment.
    """
    key = (lat.g, bad.vertices)
    hit = _PERIODS.get(key)
    if hit is not None:
        return hit
    nu = bad.nu
    out = []
    for k, j in enumerate(bad.vertices):
        c = [0] * nu
        c[k] = _dual_order(lat, j)
        out.append(_proj(lat, bad, c))
    out.sort(key=lambda p: (int(np.prod(np.asarray(p) + 1, dtype=np.float64)), p))
    orders = [_dual_order(lat, j) for j in bad.vertices]
    strict = _proj(lat, bad, orders)
    if float(np.prod(orders, dtype=np.float64)) <= 1e6:
        # c_k in [1, ord_k]; sum c_k E_{j_k}^* is integral iff its class vanishes
        grid = np.indices(orders).reshape(nu, -1).T + 1
        idx = np.asarray([lat.index_of_scaled(lat.dual_scaled[j]) for j in bad.vertices],
                         np.int64).reshape(nu, -1)
        mods = np.asarray(lat.orders, np.int64)
        ok = np.all((grid @ idx) % mods == 0, axis=1) if mods.size else np.ones(len(grid), bool)
        cands = grid[ok]
        dual = np.asarray([[lat.dual_scaled[j][b] for b in bad.vertices] for j in bad.vertices],
                          np.int64)
        projs = cands @ dual // lat.d
        vol = np.prod(projs + 1.0, axis=1)
        keys = np.lexsort(tuple(projs[:, k] for k in range(nu - 1, -1, -1)) + (vol,))
        strict = tuple(int(v) for v in projs[keys[0]])
    res = [strict] if nu == 1 else out + [strict]
    if len(_PERIODS) > 100_000:
        _PERIODS.clear()
    _PERIODS[key] = res
    return res


def seed_corner(lat: LatticeData, cls: SpinCClass, coords) -> np.ndarray:
    """Projection of max(0, floor(Z_K - 2 l'_[k])) to ``coords``.

    Z_K - 2 l'_[k] = -k_r is the centre of symmetry of chi_{k_r}; the
    rectangle up to it is the natural first guess.
    """
    out = []
    for j in coords:
        v = (lat.zk_scaled[j] - 2 * cls.dist_scaled[j]) // lat.d
        out.append(max(0, v))
    return np.asarray(out, np.int64)


def choose_corner(steps, shape, certified) -> np.ndarray:
    """Smallest-volume corner that reaches a certified corner admissibly."""
    certified = np.asarray(certified, np.int64)
    good = K.backward_good(steps, shape, certified)
    dims = tuple(int(c) + 1 for c in certified)
    pts = np.argwhere(good.reshape(dims))
    vol = np.prod(pts + 1, axis=1, dtype=np.float64)
    keys = np.lexsort(tuple(pts[:, k] for k in range(pts.shape[1] - 1, -1, -1)) + (vol,))
    return pts[keys[0]].astype(np.int64)


def certify(steps, shape, corner, per) -> bool:
    corner = np.asarray(corner, np.int64)
    return bool(K.monotone_reach(steps, shape, corner, corner + per))


def _certified_by(steps, shape, corner, pers):
    for p in pers:
        if certify(steps, shape, corner, np.asarray(p, np.int64)):
            return p
    return None


def _search(g, cls, bad, cache, cap):
    """(T, C, P): C + nP is an admissible path, T reaches C admissibly."""
    lat = lattice_data(g)
    pers = periods(lat, bad)
    reach = np.max(np.asarray(pers, np.int64), axis=0)
    strict = np.asarray(pers[-1], np.int64)
    c0 = seed_corner(lat, cls, bad.vertices)
    m = 0
    while True:
        cand = c0 + m * strict
        if int(cand.max()) > cap:
            raise StabilizationError(f"no certified corner below the cap {cap}")
        cache.ensure(cand + reach)
        steps = K.reduced_steps(cache.w, cache.shape)
        per = _certified_by(steps, cache.shape, cand, pers)
        if per is not None:
            break
        m = 1 if m == 0 else 2 * m
    if np.prod(cand + 1, dtype=np.float64) > 4e6:
        t = cand
    else:
        t = choose_corner(steps, cache.shape, cand)
    return t, cand, np.asarray(per, np.int64)


def stabilization_corner(g: PlumbingGraph, cls: SpinCClass, bad: BadSet,
                         cache: XCycleCache | None = None, cap: int = MAX_CORNER):
    """Smallest-volume certified corner T for the reduced lattice.

    T is certified when an admissible (weight non-decreasing) monotone path
    leads from T to a point C such that C -> C + P is admissible as well;
    see the module docstring.
    """
    if not bad.verified:
        raise StabilizationError("bad set is not verified")
    if bad.nu == 0:
        return np.zeros(0, np.int64)
    cache = cache or XCycleCache(g, cls, bad)
    return _search(g, cls, bad, cache, cap)[0]


def _validate_corner(g, cls, bad, cache, t, cap):
    """Certificate (C, P) for a user corner, or None."""
    lat = lattice_data(g)
    pers = periods(lat, bad)
    reach = np.max(np.asarray(pers, np.int64), axis=0)
    _, cand, per = _search(g, cls, bad, cache, cap)
    target = np.maximum(t, cand)
    strict = np.asarray(pers[-1], np.int64)
    for m in range(4):
        c = target + m * strict
        cache.ensure(c + reach)
        steps = K.reduced_steps(cache.w, cache.shape)
        p = _certified_by(steps, cache.shape, c, pers)
        if p is not None and K.monotone_reach(steps, cache.shape, t, c):
            return c, np.asarray(p, np.int64)
    return None


@dataclass
class WeightTable:
    """w-bar on R(0, T) plus provenance."""

    corner: tuple
    weights: np.ndarray
    bad: BadSet
    cls: SpinCClass
    graph_key: str
    period: tuple = ()
    certified_point: tuple = ()
    cache: XCycleCache | None = field(default=None, repr=False)

    @property
    def nu(self) -> int:
        return self.bad.nu

    @property
    def m_w(self) -> int:
        return int(self.weights.min())

    def to_json(self) -> dict:
        return {
            "bad_set": self.bad.to_json(),
            "class": self.cls.to_json(),
            "corner": list(self.corner),
            "period": list(self.period),
            "certified_point": list(self.certified_point),
            "m_w": self.m_w,
            "weights": self.weights.tolist(),
        }


def build_weight_table(g: PlumbingGraph, cls: SpinCClass, bad: BadSet, corner=None,
                       cache: XCycleCache | None = None, check: bool = True,
                       cap: int = MAX_CORNER) -> WeightTable:
    """Dense w-bar over R(0, T); T defaults to the certified corner.

    ``period`` and ``certified_point`` record the certificate: an admissible
    path runs from T to ``certified_point`` C and on through C + n P.  A user
    corner is accepted only if such a certificate is found (pass
    ``check=False`` to skip that, e.g. for experiments).
    """
    if not bad.verified:
        raise StabilizationError("bad set is not verified")
    cache = cache or XCycleCache(g, cls, bad)
    if bad.nu == 0:
        return WeightTable((), np.zeros((), np.int64), bad, cls, g.key(), (), (), cache)
    if corner is None:
        t, cand, per = _search(g, cls, bad, cache, cap)
    else:
        t = np.asarray(corner, np.int64).reshape(-1)
        if t.shape[0] != bad.nu or np.any(t < 0):
            raise ValueError("corner must have one non-negative entry per bad vertex")
        cand, per = t, np.zeros(bad.nu, np.int64)
        if check:
            cert = _validate_corner(g, cls, bad, cache, t, cap)
            if cert is None:
                raise StabilizationError(f"corner {tuple(int(v) for v in t)} is not certified")
            cand, per = cert
    w = cache.weights(t)
    return WeightTable(tuple(int(v) for v in t), w, bad, cls, g.key(),
                       tuple(int(v) for v in per), tuple(int(v) for v in cand), cache)


def cube_weight(table: WeightTable, i, subset) -> int:
    """max of w-bar over the vertices of the cube (i, subset)."""
    i = tuple(int(v) for v in i)
    subset = sorted(set(subset))
    w = table.weights
    hi = [i[k] + (1 if k in subset else 0) for k in range(table.nu)]
    if any(v < 0 or v >= n for v, n in zip(hi, w.shape)) or any(v < 0 for v in i):
        raise IndexError("cube leaves the table")
    sl = tuple(slice(i[k], hi[k] + 1) for k in range(table.nu))
    return int(w[sl].max())


def render_grid(table: WeightTable, level: int | None = None) -> str:
    """ASCII picture of w-bar for nu <= 2 (second coordinate upwards).

    With ``level`` given, points of S_level are bracketed.
    """
    w = table.weights
    if table.nu == 0:
        return f"[{int(w)}]" if level is not None and int(w) <= level else str(int(w))
    if table.nu == 1:
        w = w.reshape(-1, 1)
    if table.nu > 2:
        raise ValueError("grid rendering needs nu <= 2")
    width = max(len(str(int(v))) for v in w.ravel()) + 2
    lines = []
    for j in range(w.shape[1] - 1, -1, -1):
        cells = []
        for i in range(w.shape[0]):
            v = int(w[i, j])
            txt = f"[{v}]" if level is not None and v <= level else f" {v} "
            cells.append(txt.rjust(width + 1))
        lines.append(f"{j:>3} |" + "".join(cells))
    lines.append("    +" + "-" * ((width + 1) * w.shape[0]))
    lines.append("     " + "".join(str(i).rjust(width) + " " for i in range(w.shape[0])))
    return "\n".join(lines)
