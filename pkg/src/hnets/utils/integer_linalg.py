# src/hnets/utils/integer_linalg.py

import logging
from math import gcd
from typing import List, Optional, Sequence, Tuple

import numpy as np

logger = logging.getLogger(__name__)


def exgcd(a: int, b: int) -> np.ndarray:
    """Extended GCD algorithm.

    Args:
        a: an integer.
        b: an integer.

    Returns:
        A 2x2 integer matrix M of determinant 1 so that M @ [a, b] = [gcd(a, b), 0].
        If a divides b, M[0, 1] is guaranteed to be 0.
    """
    a_sign = -1 if a < 0 else 1
    a *= a_sign
    b_sign = -1 if b < 0 else 1
    b *= b_sign

    # Euclid on the column [a, b], tracking row operations in the augmented part.
    m = np.array([[a, 1, 0],
                  [b, 0, 1]], dtype=object)
    m = m[::-1]
    while m[1, 0] != 0:
        q = m[0, 0] // m[1, 0]
        m[0] -= q * m[1]
        m = m[::-1]

    g = m[0, 0]
    m = m[:, 1:]
    m *= [a_sign, b_sign]

    # Fix the sign of the determinant, using M[0, 0] * a + M[0, 1] * b = g.
    if g != 0:
        m[1] = [- b_sign * b // g, a_sign * a // g]

    return m


def _inv_2x2_det1(m: np.ndarray) -> np.ndarray:
    return np.array([[m[1, 1], -m[0, 1]], [-m[1, 0], m[0, 0]]], dtype=object)


def normal_form(a: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """
    Diagonalize an integer matrix by unimodular row and column operations.

    Like Smith normal form but without the divisibility chain on the diagonal.

    Args:
        a: integer matrix (any shape)

    Returns:
        (S, D, T, Sinv, Tinv) with A == S @ D @ T, D diagonal of A's shape,
        S and T of determinant 1 with exact integer inverses Sinv and Tinv
    """
    d = np.array(a, dtype=object).reshape(np.shape(a))
    rows, cols = d.shape
    s, t = np.eye(rows, dtype=object), np.eye(cols, dtype=object)
    s_inv, t_inv = s.copy(), t.copy()

    def clear_row(i):
        if (d[i, i + 1:] == 0).all():
            return False
        for j in range(i + 1, cols):
            if d[i, j] == 0:
                continue
            m = exgcd(d[i, i], d[i, j]).T
            d[:, [i, j]] = d[:, [i, j]] @ m
            t[[i, j]] = _inv_2x2_det1(m) @ t[[i, j]]
            t_inv[:, [i, j]] = t_inv[:, [i, j]] @ m
        return True

    def clear_col(i):
        if (d[i + 1:, i] == 0).all():
            return False
        for j in range(i + 1, rows):
            if d[j, i] == 0:
                continue
            m = exgcd(d[i, i], d[j, i])
            d[[i, j]] = m @ d[[i, j]]
            s[:, [i, j]] = s[:, [i, j]] @ _inv_2x2_det1(m)
            s_inv[[i, j]] = m @ s_inv[[i, j]]
        return True

    for i in range(min(rows, cols)):
        clear_col(i)
        while True:
            if not clear_row(i):
                break
            if not clear_col(i):
                break

    return s, d, t, s_inv, t_inv


def invariant_factors(diagonal: Sequence[int]) -> List[int]:
    """Merge a diagonal into a divisibility chain d_1 | d_2 | ... (zeros dropped)."""
    values = sorted(abs(int(x)) for x in diagonal if int(x) != 0)
    changed = True
    while changed:
        changed = False
        for i in range(len(values)):
            for j in range(i + 1, len(values)):
                a, b = values[i], values[j]
                if b % a != 0:
                    g = gcd(a, b)
                    values[i], values[j] = g, a * b // g
                    changed = True
        values.sort()
    return values


def abelian_invariants(relation_matrix: np.ndarray, n_generators: int) -> Tuple[int, List[int]]:
    """
    Free rank and torsion coefficients of Z^n / rowspace(relation_matrix).

    Returns:
        (rank, torsion) where torsion lists the invariant factors > 1
    """
    if n_generators == 0:
        return 0, []
    if relation_matrix.size == 0:
        return n_generators, []
    _, d, _, _, _ = normal_form(relation_matrix)
    diag = [d[i, i] for i in range(min(d.shape))]
    factors = invariant_factors(diag)
    rank = n_generators - len(factors)
    torsion = [f for f in factors if f > 1]
    logger.debug(f"Abelian invariants: rank={rank}, torsion={torsion}")
    return rank, torsion


def solve_congruences(a: np.ndarray, rhs: Sequence[int], modulus: int) -> Optional[np.ndarray]:
    """
    Solve A x = rhs (mod modulus) over the integers.

    Returns:
        One solution vector with entries in [0, modulus), or None when the
        system has no solution
    """
    a = np.array(a, dtype=object).reshape(np.shape(a))
    rows, cols = a.shape
    if rows == 0:
        return np.zeros(cols, dtype=object)
    _, d, _, s_inv, t_inv = normal_form(a)
    r = (s_inv @ np.array([int(v) for v in rhs], dtype=object)) % modulus
    y = np.zeros(cols, dtype=object)
    for i in range(rows):
        di = d[i, i] % modulus if i < cols else 0
        if di == 0:
            if r[i] % modulus != 0:
                return None
            continue
        g = gcd(int(di), modulus)
        if r[i] % g != 0:
            return None
        reduced_mod = modulus // g
        y[i] = (int(r[i]) // g) * pow(int(di) // g, -1, reduced_mod) % reduced_mod if reduced_mod > 1 else 0
    return (t_inv @ y) % modulus
