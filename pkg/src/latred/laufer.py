"""Computation sequences: Artin cycle, rationality, bad vertices, x(i) cycles."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .graph import PlumbingGraph, intersection_form
from .lattice import LatticeData, SpinCClass, lattice_data


class LauferError(RuntimeError):
    pass


def _laufer_run(rows, start):
    """Ascent from ``start``; returns (z, list of (E_j, z_n) before each step)."""
    s = len(rows)
    z = list(start)
    p = [sum(rows[j][i] * z[i] for i in range(s)) for j in range(s)]
    record = []
    while True:
        j = next((j for j in range(s) if p[j] > 0), None)
        if j is None:
            return z, record
        record.append(p[j])
        z[j] += 1
        for i in range(s):
            p[i] += rows[i][j]


def artin_fundamental_cycle(g: PlumbingGraph) -> tuple:
    """Minimal nonzero anti-nef integral cycle z_min."""
    rows = intersection_form(g).tolist()
    start = [0] * g.s
    start[0] = 1
    z, _ = _laufer_run(rows, start)
    return tuple(z)


def chi_can(g: PlumbingGraph, z) -> int:
    rows = intersection_form(g).tolist()
    s = g.s
    quad = sum(z[i] * rows[i][j] * z[j] for i in range(s) for j in range(s) if rows[i][j])
    lin = sum(z[j] * (-g.euler[j] - 2) for j in range(s))
    return -(quad + lin) // 2


def is_rational(g: PlumbingGraph) -> bool:
    """Laufer's criterion: every step of the sequence to z_min pairs to 1."""
    rows = intersection_form(g).tolist()
    start = [0] * g.s
    start[0] = 1
    z, record = _laufer_run(rows, start)
    lauf = all(v == 1 for v in record)
    if lauf != (chi_can(g, z) == 1):
        raise LauferError("Laufer sequence and chi(z_min) disagree on rationality")
    return lauf


def _dropped(g: PlumbingGraph, vertices, m: int) -> PlumbingGraph:
    euler = list(g.euler)
    for v in vertices:
        euler[v] -= m
    return PlumbingGraph(tuple(euler), g.edges)


@dataclass(frozen=True)
class BadSet:
    vertices: tuple
    verified: bool
    witness_drop: int

    @property
    def nu(self) -> int:
        return len(self.vertices)

    def to_json(self) -> dict:
        return {"vertices": list(self.vertices), "verified": self.verified,
                "witness_drop": self.witness_drop}


def verify_bad_set(g: PlumbingGraph, vertices, cap: int | None = None) -> BadSet:
    """Check that lowering the decorations on ``vertices`` makes G rational."""
    vertices = tuple(sorted({int(v) for v in vertices}))
    if any(not 0 <= v < g.s for v in vertices):
        raise ValueError("bad-set vertex out of range")
    if cap is None:
        cap = 4 * g.s * max(abs(e) for e in g.euler)
    if not vertices:
        return BadSet((), is_rational(g), 0)
    m = 1
    while m <= cap:
        if is_rational(_dropped(g, vertices, m)):
            return BadSet(vertices, True, m)
        m *= 2
    return BadSet(vertices, False, 0)


def suggest_bad_set(g: PlumbingGraph) -> BadSet:
    """Empty set, else the nodes thinned out greedily (not necessarily minimal)."""
    empty = verify_bad_set(g, ())
    if empty.verified:
        return empty
    current = tuple(g.nodes())
    best = verify_bad_set(g, current)
    if not best.verified:
        return BadSet(current, False, 0)
    for v in list(current):
        trial = tuple(x for x in best.vertices if x != v)
        cand = verify_bad_set(g, trial)
        if cand.verified:
            best = cand
    return best


class XCycleCache:
    """Dense cache of x(i), w(i) and pairings (x(i) + l', E_j) on a box.

    The box grows on demand; entries are produced by the lexicographic sweep
    of generalized Laufer sequences (see ``_kernels.xcycle_table``).
    """

    def __init__(self, g: PlumbingGraph, cls: SpinCClass, bad: BadSet):
        self.g = g
        self.lat: LatticeData = lattice_data(g)
        self.cls = cls
        self.bad = bad
        self.bad_arr = np.asarray(bad.vertices, dtype=np.int64)
        self.star_arr = np.asarray([j for j in range(g.s) if j not in bad.vertices], np.int64)
        self.form = np.ascontiguousarray(self.lat.form, dtype=np.int64)
        self.pair = np.asarray(cls.pair, dtype=np.int64)
        self.shape = np.ones(bad.nu, np.int64)
        self.x = np.zeros((1, g.s), np.int64)
        self.w = np.zeros(1, np.int64)
        self.p = self.pair.reshape(1, -1).copy()

    @property
    def nu(self) -> int:
        return self.bad.nu

    def ensure(self, corner) -> None:
        """Make sure every i <= corner is cached."""
        corner = np.asarray(corner, np.int64).reshape(-1)
        if corner.shape[0] != self.nu:
            raise ValueError("corner has the wrong dimension")
        if np.any(corner < 0):
            raise ValueError("i must be non-negative")
        need = np.maximum(self.shape, corner + 1)
        if np.all(need <= self.shape):
            return
        limit = 10_000 * (int(need.sum()) + 1) * (self.g.s + 1)
        x, w, p, status = K.xcycle_table(self.form, self.pair, self.bad_arr, self.star_arr,
                                         need.astype(np.int64), limit)
        if status:
            raise LauferError("generalized Laufer sequence did not terminate")
        self.shape, self.x, self.w, self.p = need, x, w, p

    def flat(self, i) -> int:
        i = np.asarray(i, np.int64).reshape(-1)
        self.ensure(i)
        f = 0
        for k in range(self.nu):
            f = f * int(self.shape[k]) + int(i[k])
        return f

    def x_cycle(self, i) -> tuple:
        f = self.flat(i)
        return tuple(int(v) for v in self.x[f])

    def wbar(self, i) -> int:
        f = self.flat(i)
        return int(self.w[f])

    def pairings(self, i) -> tuple:
        """``(x(i) + l'_[k], E_j)`` for all vertices j."""
        f = self.flat(i)
        return tuple(int(v) for v in self.p[f])

    def weights(self, corner) -> np.ndarray:
        """w-bar on the box [0, corner] as a nu-dimensional array."""
        corner = np.asarray(corner, np.int64).reshape(-1)
        self.ensure(corner)
        arr = self.w.reshape(tuple(int(v) for v in self.shape)) if self.nu else self.w.reshape(())
        sl = tuple(slice(0, int(c) + 1) for c in corner)
        return np.ascontiguousarray(arr[sl])


def x_cycle(g: PlumbingGraph, cls: SpinCClass, bad: BadSet, i, cache: XCycleCache | None = None):
    cache = cache or XCycleCache(g, cls, bad)
    return cache.x_cycle(i)


def wbar_increment(g: PlumbingGraph, cls: SpinCClass, cache: XCycleCache, i, k: int) -> int:
    """``1 - (x(i) + l'_[k], E_j)`` for the k-th bad vertex j."""
    j = cache.bad.vertices[k]
    return 1 - cache.pairings(i)[j]
