import itertools
from fractions import Fraction as F

import numpy as np
from hypothesis import given, strategies as st

from latred.graph import dynkin, fix1, fix2, fix3
from latred.lattice import (canonical_class, char_square, chi, discriminant_group,
                            distinguished_rep, dual_basis, is_characteristic, lattice_data,
                            pairing)

from strategies import trees


def test_dual_basis_examples():
    assert dual_basis(fix1()) == [(F(1, 2),)]
    assert dual_basis(fix2()) == [(F(3, 5), F(1, 5)), (F(1, 5), F(2, 5))]


@given(trees(max_vertices=6))
def test_dual_basis_defining_property(g):
    duals = dual_basis(g)
    for j, e in enumerate(duals):
        assert all(x > 0 for x in e)
        for k in range(g.s):
            ek = [0] * g.s
            ek[k] = 1
            assert pairing(g, e, ek) == (-1 if j == k else 0)


def test_canonical_class_examples():
    assert canonical_class(fix1()) == (0,)
    assert canonical_class(fix2()) == (F(-1, 5), F(-2, 5))
    assert all(x == 0 for x in canonical_class(dynkin("E", 8)))


def test_chi_examples():
    g = fix2()
    k = canonical_class(g)
    assert chi(g, k, (0, 0)) == 0
    assert chi(g, k, (1, 0)) == 1 and chi(g, k, (0, 1)) == 1
    assert chi(g, k, (1, 1)) == 1


def test_discriminant_group_examples():
    assert discriminant_group(fix1()).order == 2
    assert discriminant_group(fix2()).order == 5
    assert discriminant_group(dynkin("E", 8)).order == 1
    assert len(lattice_data(fix1()).classes()) == 2
    assert len(lattice_data(fix3()).classes()) == lattice_data(fix3()).d


def test_distinguished_rep_examples():
    lat = lattice_data(fix2())
    can = lat.canonical()
    assert all(x == 0 for x in can.dist_rep)
    assert can.k_r == canonical_class(fix2())
    e1 = lat.class_of_index(lat.index_of_scaled(lat.dual_scaled[0]))
    assert distinguished_rep(fix2(), e1).dist_rep == (F(3, 5), F(1, 5))
    lat1 = lattice_data(fix1())
    other = [c for c in lat1.classes() if any(c.index)][0]
    assert other.dist_rep == (F(1, 2),)


def test_char_square_examples():
    assert char_square(fix1(), canonical_class(fix1())) == 0
    assert char_square(fix2(), canonical_class(fix2())) == F(-2, 5)
    assert char_square(dynkin("E", 8), canonical_class(dynkin("E", 8))) == 0


def _brute_min(g, cls, bound=3):
    """Coordinatewise minimum of the anti-nef elements of rep + L in a box."""
    lat = lattice_data(g)
    best = None
    for c in itertools.product(range(bound + 1), repeat=g.s):
        x = [cls.rep_scaled[i] + lat.d * c[i] for i in range(g.s)]
        if all(p <= 0 for p in lat.pairing_scaled(x)):
            best = x if best is None else [min(a, b) for a, b in zip(best, x)]
    return best


@given(trees(max_vertices=4, decorations=(-2, -3, -4)))
def test_distinguished_rep_invariants(g):
    lat = lattice_data(g)
    for c in lat.classes():
        assert all(0 <= x < lat.d for x in c.rep_scaled)
        diff = [a - b for a, b in zip(c.dist_scaled, c.rep_scaled)]
        assert all(x % lat.d == 0 for x in diff)
        assert all(x >= 0 for x in c.dist_scaled)
        assert all(p <= 0 for p in lat.pairing_scaled(c.dist_scaled))
        brute = _brute_min(g, c)
        if brute is not None:
            assert all(a <= b for a, b in zip(c.dist_scaled, brute))
        kr = [a + 2 * b for a, b in zip(lat.kcan_scaled, c.dist_scaled)]
        assert list(c.kr_scaled) == kr
        assert is_characteristic(g, c.k_r)


@given(trees(max_vertices=5), st.lists(st.integers(-3, 3), min_size=10, max_size=10),
       st.lists(st.integers(-3, 3), min_size=10, max_size=10))
def test_chi_additivity_and_shift(g, a, b):
    lat = lattice_data(g)
    l1, l2 = a[:g.s], b[:g.s]
    for c in lat.classes()[:3]:
        k = c.k_r
        lhs = chi(g, k, [x + y for x, y in zip(l1, l2)])
        assert lhs == chi(g, k, l1) + chi(g, k, l2) - pairing(g, l1, l2)
        k2 = [ki + 2 * li for ki, li in zip(k, l2)]
        x_minus = [x - y for x, y in zip(l1, l2)]
        assert chi(g, k2, x_minus) == chi(g, k, l1) - chi(g, k, l2)


@given(trees(max_vertices=6))
def test_class_count_is_det(g):
    lat = lattice_data(g)
    assert len(lat.classes()) == lat.d
    assert int(np.prod(lat.orders)) == lat.d
