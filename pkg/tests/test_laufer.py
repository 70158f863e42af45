import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from latred.graph import SeifertData, dynkin, fix1, fix2, fix3, star_shaped
from latred.lattice import lattice_data
from latred.laufer import (XCycleCache, _laufer_run, artin_fundamental_cycle, chi_can,
                           is_rational, suggest_bad_set, verify_bad_set, wbar_increment,
                           x_cycle)
from latred.oracle import brute_x_cycle

from strategies import trees


def test_artin_cycle_examples():
    assert artin_fundamental_cycle(fix1()) == (1,)
    assert artin_fundamental_cycle(fix2()) == (1, 1)
    z = artin_fundamental_cycle(dynkin("E", 8))
    assert sorted(z) == sorted((2, 3, 4, 6, 5, 4, 3, 2))
    assert z[0] == 6  # branch vertex


def test_rationality_examples():
    assert is_rational(fix2())
    assert is_rational(dynkin("E", 8))
    assert not is_rational(fix3())


def test_verify_bad_set_examples():
    assert verify_bad_set(dynkin("A", 3), ()).verified
    b = verify_bad_set(fix3(), (1, 6))
    assert b.verified and b.nu == 2 and b.witness_drop >= 1
    assert not verify_bad_set(fix3(), ()).verified
    with pytest.raises(ValueError):
        verify_bad_set(fix2(), (5,))


def test_suggest_bad_set_examples():
    assert suggest_bad_set(dynkin("D", 6)).vertices == ()
    assert suggest_bad_set(fix3()).vertices == (1, 6)
    star = star_shaped(SeifertData(-2, ((3, 2), (3, 2), (3, 1))))
    assert suggest_bad_set(star).vertices in ((), (0,))


def test_x_cycle_examples():
    g = fix2()
    c = lattice_data(g).canonical()
    b = verify_bad_set(g, (0,))
    assert x_cycle(g, c, b, (0,)) == (0, 0)
    assert x_cycle(g, c, b, (1,)) == (1, 1)
    assert x_cycle(g, c, b, (2,)) == (2, 1)
    with pytest.raises(ValueError):
        x_cycle(g, c, b, (-1,))


def test_wbar_increment_examples():
    g = fix2()
    c = lattice_data(g).canonical()
    b = verify_bad_set(g, (0,))
    cache = XCycleCache(g, c, b)
    assert wbar_increment(g, c, cache, (0,), 0) == 1
    assert wbar_increment(g, c, cache, (1,), 0) == 2
    assert cache.wbar((2,)) == 3 == lattice_data(g).chi_kr(c, (2, 1))


def _bad_sets(g, max_size=2):
    for k in range(max_size + 1):
        for S in itertools.combinations(range(g.s), k):
            b = verify_bad_set(g, S)
            if b.verified and b.nu:
                yield b


@given(trees(max_vertices=5), st.integers(0, 10 ** 6))
def test_x_cycle_properties(g, seed):
    """Minimality (brute force), monotonicity, recursion consistency, lower bound."""
    rng = np.random.default_rng(seed)
    lat = lattice_data(g)
    sets = list(_bad_sets(g))
    if not sets:
        return
    b = sets[rng.integers(len(sets))]
    c = lat.classes()[rng.integers(len(lat.classes()))]
    cache = XCycleCache(g, c, b)
    corner = (2,) * b.nu
    for i in itertools.product(range(3), repeat=b.nu):
        x = cache.x_cycle(i)
        assert all(v >= 0 for v in x)
        assert cache.wbar(i) == lat.chi_kr(c, x)
        box = tuple(v + 2 for v in x)
        assert brute_x_cycle(g, c, b, i, box) == x
        for r in range(1, b.nu + 1):
            for sub in itertools.combinations(range(b.nu), r):
                j = list(i)
                for k in sub:
                    j[k] += 1
                y = cache.x_cycle(j)
                e = list(x)
                for k in sub:
                    e[b.vertices[k]] += 1
                assert all(p <= q for p, q in zip(e, y))
        # lower bound: any x' >= 0 with the same bad coordinates
        for _ in range(5):
            xr = [int(v) for v in rng.integers(0, 4, g.s)]
            for k, v in enumerate(b.vertices):
                xr[v] = i[k]
            assert lat.chi_kr(c, xr) >= cache.wbar(i)
    assert cache.weights(corner).shape == (3,) * b.nu


@given(trees(max_vertices=5), st.integers(0, 10 ** 6))
def test_endpoint_independent_of_tie_breaking(g, seed):
    """A randomized Laufer ascent reaches the same x(i); chi never increases."""
    rng = np.random.default_rng(seed)
    lat = lattice_data(g)
    sets = list(_bad_sets(g))
    if not sets:
        return
    b = sets[rng.integers(len(sets))]
    c = lat.classes()[rng.integers(len(lat.classes()))]
    rows = lat.rows
    star = [j for j in range(g.s) if j not in b.vertices]
    for i in itertools.product(range(3), repeat=b.nu):
        x = [0] * g.s
        for k, v in enumerate(b.vertices):
            x[v] = i[k]
        prev = lat.chi_kr(c, x)
        while True:
            p = [sum(rows[j][t] * x[t] for t in range(g.s)) + c.pair[j] for j in range(g.s)]
            elig = [j for j in star if p[j] > 0]
            if not elig:
                break
            x[elig[rng.integers(len(elig))]] += 1
            cur = lat.chi_kr(c, x)
            assert cur <= prev
            prev = cur
        assert tuple(x) == x_cycle(g, c, b, i)


@given(trees(max_vertices=6))
def test_rationality_criteria_agree(g):
    z, record = _laufer_run(lat_rows(g), [1] + [0] * (g.s - 1))
    assert all(v >= 1 for v in record)
    assert is_rational(g) == (chi_can(g, z) == 1)


def lat_rows(g):
    return lattice_data(g).rows


@given(trees(max_vertices=6))
def test_bad_set_witness(g):
    b = suggest_bad_set(g)
    assert b.verified
    from latred.laufer import _dropped
    assert is_rational(_dropped(g, b.vertices, b.witness_drop))
