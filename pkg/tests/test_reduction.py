import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from latred.cohomology import assemble_graded_module
from latred.graph import fix2, fix3
from latred.lattice import lattice_data
from latred.laufer import XCycleCache, verify_bad_set
from latred.oracle import modules_equal
from latred.reduction import (StabilizationError, build_weight_table, cube_weight, periods,
                              render_grid, stabilization_corner)

from strategies import trees


def fix2_setup():
    g = fix2()
    return g, lattice_data(g).canonical(), verify_bad_set(g, (0,))


def test_fix2_table():
    g, c, b = fix2_setup()
    t = build_weight_table(g, c, b, corner=(2,), check=False)
    assert t.weights.tolist() == [0, 1, 3]
    assert cube_weight(t, (1,), {0}) == 3
    assert cube_weight(t, (0,), {0}) == 1
    assert cube_weight(t, (1,), ()) == 1
    with pytest.raises(IndexError):
        cube_weight(t, (2,), {0})


def test_fix2_corner():
    # w-bar increases from the start, so the certified corner is the origin
    g, c, b = fix2_setup()
    assert tuple(stabilization_corner(g, c, b)) == (0,)
    t = build_weight_table(g, c, b, corner=(1,))
    assert t.corner == (1,)


def test_fix3_corner_and_increments():
    g = fix3()
    c = lattice_data(g).canonical()
    b = verify_bad_set(g, (1, 6))
    t = build_weight_table(g, c, b)
    assert t.corner == (14, 14)
    assert t.m_w == -1 and t.weights[0, 0] == 0
    cache = XCycleCache(g, c, b)
    lat = lattice_data(g)
    for i in range(15):
        for j in range(15):
            assert cache.wbar((i, j)) == lat.chi_kr(c, cache.x_cycle((i, j)))


def test_uncertified_override_rejected():
    g = fix3()
    c = lattice_data(g).canonical()
    b = verify_bad_set(g, (1, 6))
    with pytest.raises(StabilizationError):
        build_weight_table(g, c, b, corner=(3, 3))
    with pytest.raises(StabilizationError):
        build_weight_table(g, c, verify_bad_set(g, ()))


def test_periods_are_integral_projections():
    g = fix3()
    lat = lattice_data(g)
    b = verify_bad_set(g, (1, 6))
    pers = periods(lat, b)
    assert pers[-1][0] > 0 and pers[-1][1] > 0
    assert len(pers) == 3


def test_render_grid():
    g, c, b = fix2_setup()
    t = build_weight_table(g, c, b, corner=(2,), check=False)
    txt = render_grid(t, level=1)
    assert "[0]" in txt and "[1]" in txt and " 3 " in txt


def _random_case(g, rng):
    lat = lattice_data(g)
    sets = [verify_bad_set(g, S) for k in (1, 2) for S in itertools.combinations(range(g.s), k)]
    sets = [s for s in sets if s.verified]
    c = lat.classes()[rng.integers(len(lat.classes()))]
    return c, sets[rng.integers(len(sets))]


@given(trees(max_vertices=5, min_vertices=2), st.integers(0, 10 ** 6))
def test_enlarging_corner_keeps_modules(g, seed):
    rng = np.random.default_rng(seed)
    c, b = _random_case(g, rng)
    t = build_weight_table(g, c, b)
    big = build_weight_table(g, c, b, corner=tuple(v + 2 for v in t.corner), check=False)
    assert modules_equal(assemble_graded_module(t), assemble_graded_module(big))
    assert (big.weights[tuple(slice(0, v + 1) for v in t.corner)] == t.weights).all()


@given(trees(max_vertices=5, min_vertices=2), st.integers(0, 10 ** 6))
def test_cube_weights_compatible(g, seed):
    rng = np.random.default_rng(seed)
    c, b = _random_case(g, rng)
    t = build_weight_table(g, c, b, corner=(2,) * b.nu, check=False)
    for i in itertools.product(range(2), repeat=b.nu):
        for r in range(1, b.nu + 1):
            for sub in itertools.combinations(range(b.nu), r):
                w = cube_weight(t, i, sub)
                for k in sub:
                    face = [x for x in sub if x != k]
                    assert w >= cube_weight(t, i, face)
                    shifted = list(i)
                    shifted[k] += 1
                    assert w >= cube_weight(t, shifted, face)
