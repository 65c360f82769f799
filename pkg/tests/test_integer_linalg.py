# tests/test_integer_linalg.py
import numpy as np
import pytest
from hypothesis import given, strategies as st

from hnets.utils.integer_linalg import abelian_invariants, exgcd, invariant_factors, normal_form, solve_congruences


@pytest.mark.parametrize("a,b,g", [(12, 18, 6), (-4, 6, 2), (5, 0, 5), (0, 7, 7), (3, 9, 3)])
def test_exgcd(a, b, g):
    m = exgcd(a, b)
    assert list(m @ np.array([a, b], dtype=object)) == [g, 0]
    assert m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0] == 1


@given(st.lists(st.lists(st.integers(-6, 6), min_size=3, max_size=3), min_size=1, max_size=4))
def test_normal_form_factorises(rows):
    a = np.array(rows, dtype=object)
    s, d, t, s_inv, t_inv = normal_form(a)
    assert (s @ d @ t == a).all()
    assert (s @ s_inv == np.eye(s.shape[0], dtype=object)).all()
    assert (t @ t_inv == np.eye(t.shape[0], dtype=object)).all()
    for i in range(d.shape[0]):
        for j in range(d.shape[1]):
            if i != j:
                assert d[i, j] == 0


def test_invariant_factors():
    assert invariant_factors([2, 3]) == [1, 6]
    assert invariant_factors([0, 4, -2]) == [2, 4]


@pytest.mark.parametrize("relations,n,expected", [
    ([[2, 0], [0, 3]], 2, (0, [6])),
    ([[0, 0]], 2, (2, [])),
    ([[1, -1]], 2, (1, [])),
    ([[2, 2]], 2, (1, [2])),
])
def test_abelian_invariants(relations, n, expected):
    assert abelian_invariants(np.array(relations, dtype=object), n) == expected


def test_abelian_invariants_without_relations():
    assert abelian_invariants(np.zeros((0, 3), dtype=object), 3) == (3, [])
    assert abelian_invariants(np.zeros((0, 0), dtype=object), 0) == (0, [])


def test_solve_congruences():
    assert solve_congruences([[2]], [1], 4) is None
    assert list(solve_congruences([[3]], [1], 4)) == [3]
    x = solve_congruences([[1, 1], [1, 0]], [1, 1], 2)
    assert list(x) == [1, 0]


@given(st.lists(st.integers(0, 3), min_size=3, max_size=3))
def test_solve_congruences_hits_reachable_targets(x):
    a = np.array([[1, 2, 0], [0, 1, 1], [2, 0, 3]], dtype=object)
    rhs = list((a @ np.array(x, dtype=object)) % 4)
    y = solve_congruences(a, rhs, 4)
    assert y is not None
    assert list((a @ y) % 4) == rhs
