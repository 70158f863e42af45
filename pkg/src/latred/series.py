"""Combinatorial Poincare series Z(t), its class parts and reductions.

Exponents are stored exactly as integer vectors ``d * l'``.  Two routes are
provided:

* ``expand_zeta`` multiplies out prod_j (1 - t^{E_j^*})^{delta_j - 2} as a
  sparse dict on a downward closed region of L' (truncation is exact there
  because every factor only has exponents with non-negative entries);
* ``projected_series`` does the same product directly on the pairs
  (class h, phi(l')) for a subset of coordinates, via the numba kernel
  ``zeta_convolve``.  Tracking the class keeps it equivalent to
  decompose-then-reduce.

Support positivity: if l' = sum_j n_j E_j^* with n_j >= 0, then for any two
coordinates m, b one has l'_m <= rho_{m,b} l'_b with
rho_{m,b} = max_j (E_j^*)_m / (E_j^*)_b.  Bounding a single coordinate thus
bounds every coordinate, which is what makes all truncations finite.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
import itertools
from math import comb, ceil

import numpy as np

from . import _kernels as K
from .graph import PlumbingGraph, SeifertData, require_valid
from .lattice import LatticeData, SpinCClass, lattice_data
from .laufer import BadSet


class SeriesError(ValueError):
    pass


# --- full expansion ----------------------------------------------------------

@dataclass
class LSeries:
    """Truncated series: ``coeffs`` maps ``d * l'`` to p_{l'}.

    ``box`` holds scaled bounds (``None`` = unbounded coordinate).  With
    ``region == "box"`` the series is exact on {x : x_m <= box_m for every
    bounded m}; with ``region == "any"`` on {x : x_m < box_m for some
    bounded m}.  ``cls_index`` is set for class-pure parts.
    """

    graph: PlumbingGraph
    d: int
    coeffs: dict
    box: tuple
    region: str = "box"
    cls_index: tuple | None = None

    def in_region(self, x) -> bool:
        return _in_region(x, self.box, self.region)

    def coefficient(self, lprime) -> int:
        """p_{l'} for a rational vector l' (must lie in the exact region)."""
        x = tuple(_scale(v, self.d) for v in lprime)
        if not self.in_region(x):
            raise SeriesError("exponent outside the truncation region")
        return self.coeffs.get(x, 0)

    def to_json(self) -> dict:
        items = sorted(self.coeffs.items())
        return {
            "d": self.d,
            "region": self.region,
            "box_scaled": [None if b is None else int(b) for b in self.box],
            "class_index": None if self.cls_index is None else list(self.cls_index),
            "coeffs": [{"l_scaled": list(k), "p": int(v)} for k, v in items if v],
        }


def _scale(v, d: int) -> int:
    f = Fraction(v) * d
    if f.denominator != 1:
        raise SeriesError("exponent is not in L'")
    return int(f)


def _in_region(x, box, region) -> bool:
    if region == "box":
        return all(b is None or xi <= b for xi, b in zip(x, box))
    return any(b is not None and xi < b for xi, b in zip(x, box))


def expand_zeta(g: PlumbingGraph, box, region: str = "box") -> LSeries:
    """Expand Z(t) = prod_j (1 - t^{E_j^*})^{delta_j - 2} on a truncation region.

    ``box`` gives one bound per vertex in L' coordinates (int, Fraction or
    ``None``); at least one bound must be finite and every finite bound
    positive.
    """
    require_valid(g)
    if region not in ("box", "any"):
        raise SeriesError("region must be 'box' or 'any'")
    lat = lattice_data(g)
    if len(box) != g.s:
        raise SeriesError("box needs one bound per vertex")
    sbox = []
    for b in box:
        if b is None:
            sbox.append(None)
            continue
        if Fraction(b) <= 0:
            raise SeriesError("box bounds must be positive")
        sbox.append(int(Fraction(b) * lat.d // 1))
    sbox = tuple(sbox)
    if all(b is None for b in sbox):
        raise SeriesError("at least one coordinate must be bounded")
    coeffs = {(0,) * g.s: 1}
    for j in range(g.s):
        n = g.valency[j] - 2
        if n == 0:
            continue
        gen = tuple(lat.dual_scaled[j])
        coeffs = _times_factor(coeffs, gen, n, sbox, region)
    return LSeries(g, lat.d, coeffs, sbox, region)


def _times_factor(coeffs, gen, n, box, region):
    """Multiply by (1 - t^gen)^n, dropping monomials outside the region."""
    out: dict = {}
    for x, c in coeffs.items():
        k = 0
        y = x
        while _in_region(y, box, region):
            if n > 0:
                if k > n:
                    break
                a = (-1) ** k * comb(n, k)
            else:
                a = comb(k - n - 1, -n - 1)
            if a:
                out[y] = out.get(y, 0) + a * c
            k += 1
            y = tuple(yi + gi for yi, gi in zip(y, gen))
    return {x: c for x, c in out.items() if c}


def decompose_by_class(Z: LSeries) -> dict:
    """Split Z into its parts Z_h, keyed by class index."""
    lat = lattice_data(Z.graph)
    parts: dict = {}
    for x, c in Z.coeffs.items():
        h = lat.index_of_scaled(x)
        parts.setdefault(h, {})[x] = c
    return {h: LSeries(Z.graph, Z.d, dict(sorted(p.items())), Z.box, Z.region, h)
            for h, p in sorted(parts.items())}


# --- reduced series ----------------------------------------------------------

@dataclass
class ReducedSeries:
    """Coefficients p-bar_{i + phi(l'_[k])} indexed by i in Z^nu_{>=0}.

    ``corner`` is the truncation corner: coefficients are exact for all
    i <= corner.  ``graph``/``cls``/``bad`` are kept so that the counting
    function can project further when it needs to.
    """

    cls_index: tuple
    bad: BadSet
    coeffs: dict
    corner: tuple
    graph: PlumbingGraph | None = field(default=None, repr=False)
    cls: SpinCClass | None = field(default=None, repr=False)

    def coefficient(self, i) -> int:
        i = tuple(int(v) for v in i)
        if len(i) != self.bad.nu or any(v < 0 for v in i):
            raise SeriesError("index must be a non-negative nu-vector")
        if any(v > c for v, c in zip(i, self.corner)):
            raise SeriesError(f"index {i} is beyond the truncation corner {self.corner}")
        return self.coeffs.get(i, 0)

    def to_json(self) -> dict:
        return {
            "class_index": list(self.cls_index),
            "bad_set": list(self.bad.vertices),
            "corner": list(self.corner),
            "coeffs": [{"i": list(i), "p": int(p)} for i, p in sorted(self.coeffs.items()) if p],
        }


def _ratio_bound(lat: LatticeData, m: int, b: int) -> Fraction:
    """rho_{m,b} = max_j (E_j^*)_m / (E_j^*)_b (support positivity)."""
    return max(Fraction(lat.dual_scaled[j][m], lat.dual_scaled[j][b]) for j in range(lat.s))


def reduce_series(Zh: LSeries, bad: BadSet, cls: SpinCClass | None = None) -> ReducedSeries:
    """Set t_j = 1 off the bad vertices in a class-pure part Z_h.

    The truncation corner is the largest i for which every monomial with
    phi(l') = i + phi(l'_[k]) is guaranteed to lie in the exact region of
    Z_h, using the support positivity bound.
    """
    g = Zh.graph
    lat = lattice_data(g)
    if Zh.cls_index is None:
        idx = {lat.index_of_scaled(x) for x in Zh.coeffs}
        if len(idx) > 1:
            raise SeriesError("series is not class-pure; call decompose_by_class first")
        h = idx.pop() if idx else None
    else:
        h = Zh.cls_index
        if any(lat.index_of_scaled(x) != h for x in Zh.coeffs):
            raise SeriesError("series is not class-pure")
    if cls is None:
        if h is None:
            raise SeriesError("empty series needs an explicit class")
        cls = lat.class_of_index(h)
    elif h is not None and tuple(cls.index) != tuple(h):
        raise SeriesError("class does not match the series")
    if Zh.region != "box":
        raise SeriesError("reduction needs a 'box' truncation")
    bv = bad.vertices
    d = lat.d
    corner = []
    for b in bv:
        # largest scaled X_b such that x_b <= X_b forces x inside the box;
        # the other bad coordinates are pinned by i and bound only themselves
        lim = None
        for m, bm in enumerate(Zh.box):
            if bm is None or (m != b and m in bv):
                continue
            cap = bm if m == b else Fraction(bm) / _ratio_bound(lat, m, b)
            lim = cap if lim is None else min(lim, cap)
        if lim is None:
            raise SeriesError("box is unbounded on the bad coordinates")
        corner.append(int((Fraction(lim) - cls.dist_scaled[b]) // d))
    coeffs: dict = {}
    for x, c in Zh.coeffs.items():
        i = []
        for b in bv:
            q, r = divmod(x[b] - cls.dist_scaled[b], d)
            if r or q < 0:
                raise SeriesError("exponent outside the class cone")
            i.append(q)
        i = tuple(i)
        coeffs[i] = coeffs.get(i, 0) + c
    coeffs = {i: c for i, c in sorted(coeffs.items()) if c and all(
        v <= t for v, t in zip(i, corner))}
    return ReducedSeries(tuple(cls.index), bad, coeffs, tuple(max(-1, c) for c in corner),
                         g, cls)


# --- projected fast path -------------------------------------------------------

_PROJ: dict = {}


def projected_series(g: PlumbingGraph, coords, box):
    """Z projected to ``coords`` with classes kept, on a box.

    Returns ``(z, classes)``: ``z[h]`` is a ``box``-shaped array whose entry u
    is the sum of p_{l'} over l' in class ``classes[h]`` with
    phi(l') = phi(rep_h) + u, where ``rep_h`` is the reduced representative
    (entries in [0, 1)).  Exact on the whole box.
    """
    coords = tuple(int(c) for c in coords)
    box = tuple(int(b) for b in box)
    if not coords:
        raise SeriesError("projection needs at least one coordinate")
    if len(box) != len(coords) or any(b < 0 for b in box):
        raise SeriesError("box must have one non-negative size per coordinate")
    key = (g, coords)
    hit = _PROJ.get(key)
    if hit is not None:
        z, classes = hit
        if all(b <= n for b, n in zip(box, z.shape[1:])):
            return z[(slice(None),) + tuple(slice(0, b) for b in box)], classes
        # grow: restarting the product on a larger box is exact again
        full = tuple(max(b, n) for b, n in zip(box, z.shape[1:]))
    else:
        full = box
    res = _project(g, coords, full)
    if len(_PROJ) > 2000:
        _PROJ.clear()
    _PROJ[key] = res
    z, classes = res
    return z[(slice(None),) + tuple(slice(0, int(b)) for b in box)], classes


def _project(g, coords, box):
    lat = lattice_data(g)
    classes = lat.classes()
    pos = {tuple(c.index): n for n, c in enumerate(classes)}
    nh, s, d = len(classes), g.s, lat.d
    k = len(coords)
    mods = lat.orders
    target = np.zeros((s, nh), np.int64)
    shift = np.zeros((s, nh, max(k, 1)), np.int64)
    for j in range(s):
        gj = lat.index_of_scaled(lat.dual_scaled[j])
        for n, c in enumerate(classes):
            t = tuple((a + b) % m for a, b, m in zip(c.index, gj, mods))
            tn = pos[t]
            target[j, n] = tn
            rt = classes[tn].rep_scaled
            for q, b in enumerate(coords):
                v = c.rep_scaled[b] + lat.dual_scaled[j][b] - rt[b]
                shift[j, n, q] = v // d
    exps = np.asarray([g.valency[j] - 2 for j in range(s)], np.int64)
    barr = np.asarray(box, np.int64)
    npts = int(np.prod(barr))
    # scaled total degree of every state, for the processing order
    grids = np.indices(tuple(int(b) for b in barr)).reshape(len(barr), -1)
    base = grids.sum(axis=0) * d
    deg = np.concatenate([base + sum(c.rep_scaled[b] for b in coords) for c in classes])
    order = np.argsort(deg, kind="stable").astype(np.int64)
    z = np.zeros((nh, npts), np.int64)
    h0 = pos[(0,) * len(mods)]
    if npts:
        z[h0, 0] = 1
        z = K.zeta_convolve(z, exps, target, shift, order, barr)
    return z.reshape((nh,) + box), classes


def _offset(lat: LatticeData, cls: SpinCClass, coords) -> tuple:
    """phi(l'_[k]) - phi(rep) on ``coords`` (integral, non-negative)."""
    return tuple((cls.dist_scaled[b] - cls.rep_scaled[b]) // lat.d for b in coords)


def reduced_series(g: PlumbingGraph, cls: SpinCClass, bad: BadSet, corner) -> ReducedSeries:
    """Z-bar_h on [0, corner] via the projected convolution."""
    lat = lattice_data(g)
    corner = tuple(int(c) for c in corner)
    if len(corner) != bad.nu:
        raise SeriesError("corner has the wrong dimension")
    if bad.nu == 0:
        return ReducedSeries(tuple(cls.index), bad, {}, (), g, cls)
    off = _offset(lat, cls, bad.vertices)
    box = tuple(c + o + 1 for c, o in zip(corner, off))
    z, classes = projected_series(g, bad.vertices, box)
    h = [tuple(c.index) for c in classes].index(tuple(cls.index))
    sub = z[h][tuple(slice(o, None) for o in off)]
    coeffs = {tuple(int(v) for v in i): int(sub[tuple(i)]) for i in np.argwhere(sub != 0)}
    return ReducedSeries(tuple(cls.index), bad, dict(sorted(coeffs.items())), corner, g, cls)


def coefficient_from_weights(table, i) -> int:
    """sum over subsets I of (-1)^{|I|+1} w-bar(i, I): the predicted p-bar_i."""
    from .reduction import cube_weight
    nu = table.nu
    i = tuple(int(v) for v in i)
    if len(i) != nu:
        raise SeriesError("index has the wrong dimension")
    if nu == 0:
        return -int(table.weights)
    if any(v < 0 or v + 1 >= n for v, n in zip(i, table.weights.shape)):
        raise SeriesError("i + 1 must lie inside the table")
    tot = 0
    for r in range(nu + 1):
        for sub in itertools.combinations(range(nu), r):
            tot += (-1) ** (r + 1) * cube_weight(table, i, sub)
    return tot


def coefficients_from_weights(weights: np.ndarray) -> np.ndarray:
    """Vectorized ``coefficient_from_weights`` on the box [0, T - 1]."""
    w = np.asarray(weights, np.int64)
    nu = w.ndim
    shape = tuple(n - 1 for n in w.shape)
    out = np.zeros(shape, np.int64)
    if any(n <= 0 for n in shape):
        return out
    for r in range(nu + 1):
        for sub in itertools.combinations(range(nu), r):
            cube = None
            for eps in itertools.product(*[(0, 1) if k in sub else (0,) for k in range(nu)]):
                sl = tuple(slice(e, e + n) for e, n in zip(eps, shape))
                cube = w[sl] if cube is None else np.maximum(cube, w[sl])
            out += (-1) ** (r + 1) * cube
    return out


def counting_function(Zbar: ReducedSeries, i) -> int:
    """sum of p-bar_{i'} over i' >= 0 with i' not >= i.

    By inclusion-exclusion this is sum over nonempty K of
    (-1)^{|K|+1} S_K, where S_K sums p-bar over {i'_k < i_k for k in K} and
    all other coordinates free.  S_K only involves the K-projection of the
    class part, which is computed exactly on the box i_K, so the result does
    not depend on the truncation corner of ``Zbar``.
    """
    i = tuple(int(v) for v in i)
    nu = Zbar.bad.nu
    if len(i) != nu or any(v < 0 for v in i):
        raise SeriesError("index must be a non-negative nu-vector")
    if nu == 0 or Zbar.graph is None:
        if nu == 0:
            return 0
        raise SeriesError("counting function needs the graph of the series")
    g, cls = Zbar.graph, Zbar.cls
    lat = lattice_data(g)
    total = 0
    for r in range(1, nu + 1):
        for sub in itertools.combinations(range(nu), r):
            coords = tuple(Zbar.bad.vertices[k] for k in sub)
            lim = tuple(i[k] for k in sub)
            if any(v == 0 for v in lim):
                continue
            off = _offset(lat, cls, coords)
            box = tuple(a + o for a, o in zip(lim, off))
            z, classes = projected_series(g, coords, box)
            h = [tuple(c.index) for c in classes].index(tuple(cls.index))
            total += (-1) ** (r + 1) * int(z[h].sum())
    return total


def eu_from_series(Zbar: ReducedSeries, table, points=None) -> int:
    """counting(i) - w-bar(i), checked constant at several stabilized points.

    Default points: the corner T of the table and the certified point C
    and C + P of its certificate (see ``reduction.build_weight_table``).
    """
    if table.nu == 0:
        return 0
    cache = table.cache
    if points is None:
        t = np.asarray(table.corner, np.int64)
        pts = [t]
        if table.certified_point:
            c = np.asarray(table.certified_point, np.int64)
            pts += [c, c + np.asarray(table.period, np.int64)]
        points = pts
    vals = set()
    for p in points:
        p = tuple(int(v) for v in p)
        vals.add(counting_function(Zbar, p) - cache.wbar(p))
    if len(vals) != 1:
        raise SeriesError(f"counting function minus w-bar is not constant: {sorted(vals)}")
    return vals.pop()


# --- Seifert closed forms ----------------------------------------------------

def seifert_tau(sd: SeifertData, i_max: int) -> list:
    """N(k) = 1 - k b - sum_j ceil(k omega_j / alpha_j) for 0 <= k < i_max."""
    return [1 - k * sd.b - sum(ceil(Fraction(k * w, a)) for a, w in sd.legs)
            for k in range(i_max)]


def seifert_eu(sd: SeifertData) -> int:
    """sum_k max(0, -N(k)); N(k) > 0 once k |e| > #legs - 1."""
    e = sd.b + sum(Fraction(w, a) for a, w in sd.legs)
    if e >= 0:
        raise SeriesError("orbifold Euler number must be negative")
    kmax = int((len(sd.legs) - 1) / -e) + 2
    return sum(max(0, -n) for n in seifert_tau(sd, kmax))


def seifert_reduced_coeffs(sd: SeifertData, i_max: int) -> list:
    """Coefficients max(0, N(k)) of Z-bar_0 for the canonical class."""
    return [max(0, n) for n in seifert_tau(sd, i_max)]


def series_identity_mismatches(table) -> list:
    """Indices i in [0, T] where p-bar_i differs from the weight prediction.

    The weights are read on [0, T + 1] from the table's x-cycle cache.
    """
    if table.nu == 0:
        return []
    t = np.asarray(table.corner, np.int64)
    pred = coefficients_from_weights(table.cache.weights(t + 1))
    g = table.cache.g
    zbar = reduced_series(g, table.cls, table.bad, t)
    got = np.zeros_like(pred)
    for i, p in zbar.coeffs.items():
        got[i] = p
    return [tuple(int(v) for v in i) for i in np.argwhere(got != pred)]
