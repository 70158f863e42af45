"""Lattices L and L', characteristic elements, chi weights, spin^c classes.

Rational cycles are handled internally as integer vectors scaled by
``d = det(-I)``; the public functions return tuples of ``Fraction``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .graph import PlumbingGraph, bareiss_det, intersection_form, require_valid
from .snf import smith_normal_form


class LatticeError(ArithmeticError):
    pass


def _exact_inverse_scaled(rows, d):
    """``d * inverse(rows)`` as an integer matrix (Gauss-Jordan over Q)."""
    n = len(rows)
    aug = [[Fraction(x) for x in r] + [Fraction(int(i == j)) for j in range(n)]
           for i, r in enumerate(rows)]
    for c in range(n):
        piv = next(i for i in range(c, n) if aug[i][c] != 0)
        aug[c], aug[piv] = aug[piv], aug[c]
        p = aug[c][c]
        aug[c] = [x / p for x in aug[c]]
        for i in range(n):
            if i != c and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[c])]
    out = [[aug[i][n + j] * d for j in range(n)] for i in range(n)]
    for row in out:
        for x in row:
            if x.denominator != 1:
                raise LatticeError("scaled inverse is not integral")
    return [[int(x) for x in row] for row in out]


@dataclass(frozen=True)
class SpinCClass:
    """A spin^c class with its representatives.

    ``index`` are coordinates in the Smith-form presentation of H.  The
    ``*_scaled`` tuples hold ``d`` times the corresponding rational cycle;
    ``pair`` holds the integers ``(l'_[k], E_j)``.
    """

    index: tuple
    d: int
    rep_scaled: tuple
    dist_scaled: tuple | None = None
    kr_scaled: tuple | None = None
    pair: tuple | None = None

    @property
    def rep(self) -> tuple:
        return tuple(Fraction(x, self.d) for x in self.rep_scaled)

    @property
    def dist_rep(self) -> tuple:
        return tuple(Fraction(x, self.d) for x in self.dist_scaled)

    @property
    def k_r(self) -> tuple:
        return tuple(Fraction(x, self.d) for x in self.kr_scaled)

    def is_canonical(self) -> bool:
        return not any(self.index)

    def to_json(self) -> dict:
        out = {
            "class_index": list(self.index),
            "rep": [[f.numerator, f.denominator] for f in self.rep],
        }
        if self.kr_scaled is not None:
            out["dist_rep"] = [[f.numerator, f.denominator] for f in self.dist_rep]
            out["k_r"] = [[f.numerator, f.denominator] for f in self.k_r]
        return out


class LatticeData:
    """Cached exact linear algebra for one graph."""

    def __init__(self, g: PlumbingGraph):
        require_valid(g)
        self.g = g
        self.s = g.s
        self.form = intersection_form(g)
        rows = self.form.tolist()
        self.rows = rows
        self.d = bareiss_det([[-x for x in r] for r in rows])
        # d * I^{-1}; columns of -inv_scaled are d * E_j^*
        self.inv_scaled = _exact_inverse_scaled(rows, self.d)
        self.dual_scaled = [[-self.inv_scaled[i][j] for i in range(self.s)] for j in range(self.s)]
        rhs = [-e - 2 for e in g.euler]
        self.kcan_scaled = tuple(sum(self.inv_scaled[i][j] * rhs[j] for j in range(self.s))
                                 for i in range(self.s))
        self.adjunction = tuple(rhs)
        # Smith form U I V = D; I symmetric, so V^T I U^T = D as well and
        # V^T serves as the row transform of the cokernel presentation.
        _, dmat, v, vinv = smith_normal_form(rows)
        diag = [dmat[i][i] for i in range(self.s)]
        self.snf_diag = diag
        self.nontrivial = [i for i, x in enumerate(diag) if x > 1]
        self.orders = tuple(diag[i] for i in self.nontrivial)
        self.coker_u = [[v[j][i] for j in range(self.s)] for i in range(self.s)]  # V^T
        self.coker_uinv = [[vinv[j][i] for j in range(self.s)] for i in range(self.s)]
        self._classes = None

    # --- rational helpers -------------------------------------------------
    def pairing_scaled(self, x_scaled):
        """``(x, E_j)`` for all j, for ``x = x_scaled / d``; must be integral."""
        out = []
        for j in range(self.s):
            t = sum(self.rows[j][i] * x_scaled[i] for i in range(self.s))
            if t % self.d:
                raise LatticeError("vector is not in L'")
            out.append(t // self.d)
        return tuple(out)

    def index_of_scaled(self, x_scaled) -> tuple:
        """Class index of ``x_scaled/d`` in the Smith presentation of H."""
        v = self.pairing_scaled(x_scaled)  # I x, integral
        w = [sum(self.coker_u[i][j] * v[j] for j in range(self.s)) for i in range(self.s)]
        return tuple(w[i] % self.diag_at(i) for i in self.nontrivial)

    def diag_at(self, i):
        return self.snf_diag[i]

    def rep_from_index(self, index) -> tuple:
        c = [0] * self.s
        for pos, val in zip(self.nontrivial, index):
            c[pos] = int(val)
        v = [sum(self.coker_uinv[i][j] * c[j] for j in range(self.s)) for i in range(self.s)]
        x = [sum(self.inv_scaled[i][j] * v[j] for j in range(self.s)) for i in range(self.s)]
        return tuple(xi % self.d for xi in x)

    def classes(self) -> list:
        if self._classes is None:
            out = []
            for idx in itertools.product(*[range(n) for n in self.orders]):
                out.append(distinguished_from_rep(self, SpinCClass(tuple(idx), self.d,
                                                                   self.rep_from_index(idx))))
            self._classes = out
        return self._classes

    def class_of_index(self, index) -> SpinCClass:
        index = tuple(int(i) % n for i, n in zip(index, self.orders))
        return distinguished_from_rep(self, SpinCClass(index, self.d, self.rep_from_index(index)))

    def canonical(self) -> SpinCClass:
        return self.class_of_index((0,) * len(self.orders))

    def chi_kr(self, cls: SpinCClass, x) -> int:
        """chi_{k_r}(x) for an integral cycle x, via integer pairings."""
        x = [int(v) for v in x]
        quad = sum(x[i] * self.rows[i][j] * x[j] for i in range(self.s) for j in range(self.s)
                   if self.rows[i][j])
        lin = sum(x[j] * (self.adjunction[j] + 2 * cls.pair[j]) for j in range(self.s))
        val = quad + lin
        if val % 2:
            raise LatticeError("chi is not integral")
        return -val // 2

    @property
    def zk_scaled(self) -> tuple:
        """``d * Z_K`` with ``Z_K = -k_can``."""
        return tuple(-x for x in self.kcan_scaled)


@lru_cache(maxsize=4096)
def lattice_data(g: PlumbingGraph) -> LatticeData:
    return LatticeData(g)


def distinguished_from_rep(lat: LatticeData, cls: SpinCClass) -> SpinCClass:
    """Laufer-type ascent from the [0,1)-representative to l'_[k]."""
    x = list(cls.rep_scaled)
    d = lat.d
    pair = list(lat.pairing_scaled(x))
    guard = 0
    while True:
        j = next((j for j in range(lat.s) if pair[j] > 0), None)
        if j is None:
            break
        x[j] += d
        for i in range(lat.s):
            pair[i] += lat.rows[i][j]
        guard += 1
        if guard > 10 ** 7:
            raise LatticeError("distinguished representative ascent did not terminate")
    kr = tuple(k + 2 * xi for k, xi in zip(lat.kcan_scaled, x))
    return SpinCClass(cls.index, d, cls.rep_scaled, tuple(x), kr, tuple(pair))


# Public operations -----------------------------------------------------------

def dual_basis(g: PlumbingGraph) -> list:
    lat = lattice_data(g)
    return [tuple(Fraction(v, lat.d) for v in col) for col in lat.dual_scaled]


def canonical_class(g: PlumbingGraph) -> tuple:
    lat = lattice_data(g)
    return tuple(Fraction(v, lat.d) for v in lat.kcan_scaled)


def pairing(g: PlumbingGraph, x, y) -> Fraction:
    """The intersection pairing of two (rational) cycles."""
    rows = intersection_form(g).tolist()
    s = len(rows)
    return sum((Fraction(x[i]) * rows[i][j] * Fraction(y[j])
                for i in range(s) for j in range(s) if rows[i][j]), Fraction(0))


def chi(g: PlumbingGraph, k, l) -> int:
    """chi_k(l) = -(l, l + k)/2 for a characteristic ``k``."""
    val = -(pairing(g, l, l) + pairing(g, l, k)) / 2
    if val.denominator != 1:
        raise LatticeError("chi_k(l) is not integral: k is not characteristic")
    return int(val)


def is_characteristic(g: PlumbingGraph, k) -> bool:
    s = g.s
    kk = [Fraction(v) for v in k]
    for j in range(s):
        e = [0] * s
        e[j] = 1
        val = pairing(g, kk, e) + g.euler[j]
        if val.denominator != 1 or val.numerator % 2:
            return False
    return True


@dataclass(frozen=True)
class DiscriminantGroup:
    orders: tuple
    classes: tuple

    @property
    def order(self) -> int:
        n = 1
        for o in self.orders:
            n *= o
        return n


def discriminant_group(g: PlumbingGraph) -> DiscriminantGroup:
    lat = lattice_data(g)
    skel = tuple(SpinCClass(c.index, c.d, c.rep_scaled) for c in lat.classes())
    return DiscriminantGroup(lat.orders, skel)


def distinguished_rep(g: PlumbingGraph, cls: SpinCClass) -> SpinCClass:
    return distinguished_from_rep(lattice_data(g), cls)


def char_square(g: PlumbingGraph, k) -> Fraction:
    return pairing(g, k, k)


def class_of(g: PlumbingGraph, lprime) -> SpinCClass:
    """The class of a rational cycle (given as Fractions)."""
    lat = lattice_data(g)
    scaled = [Fraction(v) * lat.d for v in lprime]
    if any(v.denominator != 1 for v in scaled):
        raise LatticeError("denominators must divide d")
    return lat.class_of_index(lat.index_of_scaled([int(v) for v in scaled]))


def as_int_array(x) -> np.ndarray:
    return np.asarray([int(v) for v in x], dtype=np.int64)
