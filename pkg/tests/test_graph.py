import json

import numpy as np
import pytest
from hypothesis import given

from latred.graph import (GraphError, PlumbingGraph, SeifertData, blow_up, chain_det,
                          det_minus_form, dynkin, fix1, fix2, fix3, intersection_form,
                          negative_continued_fraction, parse_graph, parse_seifert, star_shaped,
                          validate_graph)

from strategies import trees


def doc(euler, edges):
    return json.dumps({"vertices": [{"id": i, "e": e} for i, e in enumerate(euler)],
                       "edges": [list(e) for e in edges]})


def test_parse_fixtures():
    assert parse_graph(doc([-2], [])) == fix1()
    g = parse_graph(doc([-2, -3], [(0, 1)]))
    assert g == fix2() and g.s == 2
    g3 = parse_graph(doc(fix3().euler, fix3().edges))
    assert g3.s == 10 and len(g3.edges) == 9


def test_parse_round_trip():
    g = fix3()
    assert parse_graph(json.dumps(g.to_document())) == g


@pytest.mark.parametrize("bad", [
    "not json",
    json.dumps({"edges": []}),
    json.dumps({"vertices": [{"id": 0, "e": -2}, {"id": 0, "e": -2}]}),
    json.dumps({"vertices": [{"id": 0, "e": -2}], "edges": [[0, 0]]}),
    json.dumps({"vertices": [{"id": 1, "e": -2}]}),
    json.dumps({"vertices": [{"id": 0, "e": -2}, {"id": 1, "e": -2}], "edges": [[0, 2]]}),
])
def test_parse_errors(bad):
    with pytest.raises(GraphError):
        parse_graph(bad)


def test_validate_examples():
    rep = validate_graph(fix1())
    assert rep.ok and rep.minors == [2]
    rep = validate_graph(fix2())
    assert rep.ok and rep.minors == [2, 5]
    assert not validate_graph(PlumbingGraph((1,), ())).ok
    assert not validate_graph(PlumbingGraph((1,), ())).checks["negative_definite"]
    assert validate_graph(fix3()).ok


def test_validate_structure():
    two = PlumbingGraph((-2, -2), ())
    assert not validate_graph(two).checks["connected"]
    cyc = PlumbingGraph((-3, -3, -3), ((0, 1), (1, 2), (0, 2)))
    assert not validate_graph(cyc).checks["tree"]


def test_intersection_form():
    assert intersection_form(fix1()).tolist() == [[-2]]
    assert intersection_form(fix2()).tolist() == [[-2, 1], [1, -3]]
    m = intersection_form(fix3())
    assert list(np.diag(m)) == list(fix3().euler)
    assert (m == m.T).all() and m.sum() - np.trace(m) == 18


def test_blow_up_examples():
    assert blow_up(fix2(), (0, 1)) == PlumbingGraph((-3, -4, -1), ((0, 2), (1, 2)))
    assert blow_up(fix1(), 0) == PlumbingGraph((-3, -1), ((0, 1),))
    assert blow_up(fix1(), ("free", 0)) == blow_up(fix1(), 0)
    with pytest.raises(GraphError):
        blow_up(fix2(), 5)
    with pytest.raises(GraphError):
        blow_up(fix3(), (0, 5))


@given(trees(max_vertices=6))
def test_blow_up_preserves_det(g):
    for site in [0, g.s - 1] + list(g.edges[:2]):
        g2 = blow_up(g, site)
        assert validate_graph(g2).ok
        assert det_minus_form(g2) == det_minus_form(g)


def test_star_shaped_examples():
    # centre -1 with leaves -2,-3,-5 has det(-I) = -1: rejected
    assert [negative_continued_fraction(a, 1) for a in (2, 3, 5)] == [[2], [3], [5]]
    with pytest.raises(GraphError):
        star_shaped(SeifertData(-1, ((2, 1), (3, 1), (5, 1))))
    e8 = star_shaped(SeifertData(-2, ((2, 1), (3, 2), (5, 4))))
    assert e8.valency[0] == 3 and det_minus_form(e8) == 1 and set(e8.euler) == {-2}
    g = star_shaped(SeifertData(-2, ((3, 2), (2, 1), (2, 1))))
    assert g.euler == (-2, -2, -2, -2, -2) and g.edges[:2] == ((0, 1), (1, 2))
    # three (3,2) legs on -2 give orbifold Euler number 0: not definite
    with pytest.raises(GraphError):
        star_shaped(SeifertData(-2, ((3, 2), (3, 2), (3, 2))))
    assert negative_continued_fraction(3, 2) == [2, 2]
    with pytest.raises(GraphError):
        star_shaped(SeifertData(-1, ((2, 1), (2, 1), (2, 1))))
    with pytest.raises(GraphError):
        SeifertData(-1, ((2, 1), (3, 1)))
    with pytest.raises(GraphError):
        SeifertData(-1, ((4, 2), (3, 1), (5, 1)))


@pytest.mark.parametrize("alpha", range(2, 12))
def test_continued_fraction_determinant(alpha):
    for omega in range(1, alpha):
        if np.gcd(alpha, omega) != 1:
            continue
        cf = negative_continued_fraction(alpha, omega)
        assert all(c >= 2 for c in cf)
        assert chain_det([-c for c in cf]) == alpha


def test_parse_seifert():
    sd = parse_seifert('{"b":-1,"legs":[[2,1],[3,1],[5,1]]}')
    assert sd.b == -1 and sd.legs == ((2, 1), (3, 1), (5, 1))
    with pytest.raises(GraphError):
        parse_seifert('{"b":-1}')


def test_dynkin_unimodular_e8():
    assert det_minus_form(dynkin("E", 8)) == 1
    assert det_minus_form(dynkin("A", 4)) == 5
    assert det_minus_form(dynkin("D", 5)) == 4
