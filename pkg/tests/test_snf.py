import numpy as np
from hypothesis import given, strategies as st

from latred.snf import (invariant_factors_dense, invariant_factors_sparse, matmul, rank_dense,
                        smith_normal_form, smith_normal_form_np)

matrices = st.integers(1, 5).flatmap(lambda m: st.integers(1, 5).flatmap(
    lambda n: st.lists(st.lists(st.integers(-6, 6), min_size=n, max_size=n),
                       min_size=m, max_size=m)))


def _check_snf(a, u, d, v, vinv):
    assert matmul(matmul(u, a), v) == d
    n = len(v)
    assert matmul(v, vinv) == [[int(i == j) for j in range(n)] for i in range(n)]
    diag = [d[i][i] for i in range(min(len(d), len(d[0])))]
    assert all(x >= 0 for x in diag)
    for i in range(len(d)):
        for j in range(len(d[0])):
            if i != j:
                assert d[i][j] == 0
    nz = [x for x in diag if x]
    assert all(b % a == 0 for a, b in zip(nz, nz[1:]))
    assert diag[:len(nz)] == nz


@given(matrices)
def test_snf_properties(a):
    _check_snf(a, *smith_normal_form(a))


@given(matrices)
def test_snf_numpy_agrees(a):
    u, d, v, vinv = smith_normal_form_np(a)
    assert np.array_equal(u @ np.asarray(a, np.int64) @ v, d)
    assert d.tolist() == smith_normal_form(a, transforms=False)


@given(matrices)
def test_sparse_factors_match_dense(a):
    rows = [{j: x for j, x in enumerate(r) if x} for r in a]
    assert invariant_factors_sparse(rows, len(a[0])) == invariant_factors_dense(a)
    assert len(invariant_factors_dense(a)) == rank_dense(a)


def test_known_group():
    # the A_2 form has discriminant group Z/3
    d = smith_normal_form([[2, -1], [-1, 2]], transforms=False)
    assert d == [[1, 0], [0, 3]]
