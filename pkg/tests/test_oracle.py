import itertools
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, strategies as st

from latred.cohomology import assemble_graded_module, euler_capped_eu
from latred.graph import fix2, fix3
from latred.lattice import lattice_data
from latred.laufer import XCycleCache, verify_bad_set
from latred.oracle import (OracleError, ResourceError, brute_x_cycle, chi_kr, full_eu, full_lattice_cohomology,
                           hilbert_identity, hilbert_point, modules_equal, oracle_corner,
                           zeta_coefficient_bruteforce)
from latred.oracle import _strict_cycle
from latred.reduction import build_weight_table
from latred.series import expand_zeta

from strategies import trees


def _verified_sets(g):
    for k in range(1, g.s + 1):
        for S in itertools.combinations(range(g.s), k):
            b = verify_bad_set(g, S)
            if b.verified:
                yield b


@given(trees(max_vertices=5, min_vertices=2), st.integers(0, 10 ** 6))
def test_brute_x_cycle_matches_ascent(g, seed):
    rng = np.random.default_rng(seed)
    lat = lattice_data(g)
    sets = list(_verified_sets(g))
    b = sets[rng.integers(len(sets))]
    c = lat.classes()[rng.integers(len(lat.classes()))]
    i = tuple(int(v) for v in rng.integers(0, 3, b.nu))
    cache = XCycleCache(g, c, b)
    x = cache.x_cycle(i)
    box = np.asarray(x, np.int64) + 2
    assert brute_x_cycle(g, c, b, i, box) == tuple(int(v) for v in x)


def test_brute_x_cycle_errors():
    g = fix2()
    c = lattice_data(g).canonical()
    b = verify_bad_set(g, (0,))
    with pytest.raises(ValueError):
        brute_x_cycle(g, c, b, (-1,), (3, 3))
    with pytest.raises(OracleError):
        brute_x_cycle(g, c, b, (5,), (5, 0))


@given(trees(max_vertices=4, min_vertices=1), st.integers(0, 10 ** 6))
def test_zeta_coefficient_bruteforce(g, seed):
    """Coefficients of Z(t) from chi_{k_r} cube weights match the product expansion."""
    rng = np.random.default_rng(seed)
    lat = lattice_data(g)
    c = lat.classes()[rng.integers(len(lat.classes()))]
    l = rng.integers(0, 3, g.s)
    x = [c.dist_scaled[j] + lat.d * int(l[j]) for j in range(g.s)]
    bound = [F(v + 1, lat.d) for v in x]
    z = expand_zeta(g, bound)
    assert zeta_coefficient_bruteforce(g, c, l) == z.coefficient(tuple(F(v, lat.d) for v in x))


def test_fix2_full_vs_reduced():
    g = fix2()
    lat = lattice_data(g)
    b = verify_bad_set(g, (0,))
    for c in lat.classes():
        full = full_lattice_cohomology(g, c)
        red = assemble_graded_module(build_weight_table(g, c, b))
        assert modules_equal(red, full)


def test_fix3_full_lattice_is_refused():
    """The full FIX-3 rectangle has ~2.8e10 cubes; the oracle refuses it up front."""
    g = fix3()
    c = lattice_data(g).canonical()
    with pytest.raises(ResourceError):
        full_eu(g, c)


@given(trees(max_vertices=4, min_vertices=1), st.integers(0, 10 ** 6))
def test_hilbert_identity(g, seed):
    rng = np.random.default_rng(seed)
    lat = lattice_data(g)
    c = lat.classes()[rng.integers(len(lat.classes()))]
    lhs, rhs = hilbert_identity(g, c)
    assert lhs == rhs
    l = hilbert_point(g, c)
    # adding a strictly anti-nef cycle keeps l + l' - Z_K inside the cone
    l2 = tuple(int(v) for v in np.asarray(l) + int(rng.integers(1, 3)) * _strict_cycle(g))
    lhs, rhs = hilbert_identity(g, c, l2)
    assert lhs == rhs


@given(trees(max_vertices=4, min_vertices=1), st.integers(0, 10 ** 6))
def test_oracle_corner_is_stable(g, seed):
    """Enlarging the certified corner does not change the cohomology."""
    rng = np.random.default_rng(seed)
    lat = lattice_data(g)
    c = lat.classes()[rng.integers(len(lat.classes()))]
    corner = np.asarray(oracle_corner(g, c), np.int64)
    bigger = corner + rng.integers(0, 2, g.s)
    if np.prod(2 * bigger + 1.0) > 2e5:
        return
    assert modules_equal(full_lattice_cohomology(g, c, corner),
                         full_lattice_cohomology(g, c, bigger))


def test_chi_kr_zero_at_origin():
    g = fix3()
    for c in lattice_data(g).classes()[:3]:
        assert chi_kr(g, c, np.zeros(g.s, np.int64)) == 0
