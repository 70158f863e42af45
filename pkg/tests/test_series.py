import itertools
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, strategies as st

from latred.cohomology import assemble_graded_module, euler_capped_eu
from latred.graph import SeifertData, dynkin, fix1, fix2, fix3, star_shaped
from latred.lattice import lattice_data
from latred.laufer import XCycleCache, suggest_bad_set, verify_bad_set
from latred.reduction import build_weight_table
from latred.series import (SeriesError, coefficient_from_weights, coefficients_from_weights,
                           counting_function, decompose_by_class, eu_from_series, expand_zeta,
                           projected_series, reduce_series, reduced_series, seifert_eu,
                           seifert_reduced_coeffs, seifert_tau, series_identity_mismatches)

from strategies import trees


def test_expand_fix1():
    z = expand_zeta(fix1(), [5])
    for k in range(11):
        assert z.coefficient((F(k, 2),)) == k + 1


def test_expand_fix2():
    z = expand_zeta(fix2(), [3, 3])
    assert z.coefficient((0, 0)) == 1
    assert z.coefficient((F(4, 5), F(3, 5))) == 1
    assert all(c > 0 for c in z.coeffs.values())


def test_expand_errors():
    with pytest.raises(SeriesError):
        expand_zeta(fix2(), [0, 3])
    with pytest.raises(SeriesError):
        expand_zeta(fix2(), [None, None])
    with pytest.raises(SeriesError):
        expand_zeta(fix2(), [3])


def test_decompose_fix2():
    z = expand_zeta(fix2(), [3, 3])
    parts = decompose_by_class(z)
    total = {}
    for p in parts.values():
        for x, c in p.coeffs.items():
            total[x] = total.get(x, 0) + c
    assert total == z.coeffs
    lat = lattice_data(fix2())
    assert lat.index_of_scaled((5, 5)) == (0,)
    e1 = lat.index_of_scaled(lat.dual_scaled[0])
    assert (3, 1) in parts[e1].coeffs


def test_reduce_fix2():
    g = fix2()
    lat = lattice_data(g)
    b = verify_bad_set(g, (0,))
    parts = decompose_by_class(expand_zeta(g, [3, None]))
    zb = reduce_series(parts[(0,)], b, lat.canonical())
    assert zb.coefficient((0,)) == 1 and zb.coefficient((1,)) == 2
    with pytest.raises(SeriesError):
        reduce_series(expand_zeta(g, [3, None]), b)
    empty = reduce_series(type(parts[(0,)])(g, lat.d, {}, (15, None)), b, lat.canonical())
    assert empty.coeffs == {}


def test_coefficient_from_weights_fix2():
    g = fix2()
    b = verify_bad_set(g, (0,))
    t = build_weight_table(g, lattice_data(g).canonical(), b, corner=(2,), check=False)
    assert coefficient_from_weights(t, (0,)) == 1
    assert coefficient_from_weights(t, (1,)) == 2
    with pytest.raises(SeriesError):
        coefficient_from_weights(t, (2,))


def test_counting_fix2():
    g = fix2()
    c = lattice_data(g).canonical()
    zb = reduced_series(g, c, verify_bad_set(g, (0,)), (5,))
    assert counting_function(zb, (0,)) == 0
    assert counting_function(zb, (1,)) == 1
    assert counting_function(zb, (2,)) == 3


def test_eu_from_series_examples():
    g = fix2()
    c = lattice_data(g).canonical()
    b = verify_bad_set(g, (0,))
    t = build_weight_table(g, c, b)
    assert eu_from_series(reduced_series(g, c, b, t.corner), t) == 0
    g = dynkin("D", 5)
    c = lattice_data(g).canonical()
    b = verify_bad_set(g, (0,))
    t = build_weight_table(g, c, b)
    assert eu_from_series(reduced_series(g, c, b, t.corner), t) == 0


def test_fix3_series():
    g = fix3()
    c = lattice_data(g).canonical()
    b = verify_bad_set(g, (1, 6))
    t = build_weight_table(g, c, b)
    assert series_identity_mismatches(t) == []
    zb = reduced_series(g, c, b, t.corner)
    assert eu_from_series(zb, t) == 5 == euler_capped_eu(assemble_graded_module(t))


def test_dict_and_projected_routes_agree():
    g = fix3()
    lat = lattice_data(g)
    c = lat.canonical()
    b = verify_bad_set(g, (1, 6))
    bound = [None] * g.s
    bound[1] = F(c.dist_scaled[1] + lat.d * 4 + 1, lat.d)
    bound[6] = F(c.dist_scaled[6] + lat.d * 4 + 1, lat.d)
    parts = decompose_by_class(expand_zeta(g, bound))
    slow = reduce_series(parts[tuple(c.index)], b, c)
    fast = reduced_series(g, c, b, slow.corner)
    assert slow.corner == (4, 4)
    assert slow.coeffs == fast.coeffs


@given(trees(max_vertices=4, min_vertices=2), st.integers(0, 10 ** 6))
def test_projected_matches_dict_expansion(g, seed):
    rng = np.random.default_rng(seed)
    lat = lattice_data(g)
    j = int(rng.integers(g.s))
    size = int(rng.integers(1, 3))
    z, classes = projected_series(g, (j,), (size,))
    for h, c in enumerate(classes):
        bound = [None] * g.s
        bound[j] = F(c.rep_scaled[j] + lat.d * size, lat.d)
        full = expand_zeta(g, bound, region="any")
        got = [0] * size
        for x, coef in full.coeffs.items():
            if lat.index_of_scaled(x) == c.index:
                got[(x[j] - c.rep_scaled[j]) // lat.d] += coef
        assert got == z[h].tolist()


@given(trees(max_vertices=5, min_vertices=2), st.integers(0, 10 ** 6))
def test_series_identity_random(g, seed):
    rng = np.random.default_rng(seed)
    lat = lattice_data(g)
    sets = [verify_bad_set(g, S) for k in (1, 2) for S in itertools.combinations(range(g.s), k)]
    sets = [s for s in sets if s.verified]
    b = sets[rng.integers(len(sets))]
    c = lat.classes()[rng.integers(len(lat.classes()))]
    t = build_weight_table(g, c, b)
    assert series_identity_mismatches(t) == []
    zb = reduced_series(g, c, b, t.corner)
    assert eu_from_series(zb, t) == euler_capped_eu(assemble_graded_module(t))


@given(trees(max_vertices=5, min_vertices=2), st.integers(0, 10 ** 6))
def test_quasi_polynomiality(g, seed):
    """w-bar(i + n P) is a degree-2 polynomial in n for an integral period P."""
    from latred.reduction import periods
    rng = np.random.default_rng(seed)
    lat = lattice_data(g)
    b = suggest_bad_set(g)
    if not b.nu:
        b = verify_bad_set(g, (0,))
    c = lat.classes()[rng.integers(len(lat.classes()))]
    per = np.asarray(periods(lat, b)[-1])
    cache = XCycleCache(g, c, b)
    i = rng.integers(0, 3, b.nu)
    vals = [cache.wbar(i + n * per) for n in range(5)]
    coef = np.polyfit(range(4), vals[:4], 3)
    assert abs(coef[0]) < 1e-9
    assert round(np.polyval(coef, 4)) == vals[4]


def test_seifert_examples():
    assert seifert_tau(SeifertData(-2, ((3, 2), (3, 2), (3, 2))), 2) == [1, 0]
    for sd in [SeifertData(-2, ((2, 1), (3, 2), (5, 4))), SeifertData(-1, ((3, 1), (3, 1), (3, 1)))]:
        assert seifert_tau(sd, 1) == [1]


@pytest.mark.parametrize("sd", [
    SeifertData(-2, ((2, 1), (3, 2), (5, 4))),
    SeifertData(-2, ((3, 1), (3, 1), (3, 1))),
    SeifertData(-3, ((2, 1), (5, 2), (7, 3), (3, 1))),
    SeifertData(-2, ((2, 1), (3, 1), (7, 1))),
])
def test_seifert_closed_forms(sd):
    g = star_shaped(sd)
    c = lattice_data(g).canonical()
    b = verify_bad_set(g, (0,))
    cache = XCycleCache(g, c, b)
    taus = seifert_tau(sd, 31)
    for i in range(31):
        assert cache.wbar((i,)) == sum(taus[:i])
    t = build_weight_table(g, c, b)
    assert euler_capped_eu(assemble_graded_module(t)) == seifert_eu(sd)
    zb = reduced_series(g, c, b, (20,))
    assert [zb.coefficient((i,)) for i in range(21)] == seifert_reduced_coeffs(sd, 21)
