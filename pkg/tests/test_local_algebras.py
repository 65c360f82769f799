# tests/test_local_algebras.py
import numpy as np

from hnets.algebra.local_algebras import FullMatrixAlgebra, GradedCommutantAlgebra, LocalAlgebra, SpanAlgebra
from hnets.algebra.groupkit import PAULI_X, PAULI_Z


def test_full_matrix_algebra():
    alg = FullMatrixAlgebra(2)
    assert isinstance(alg, LocalAlgebra)
    assert alg.contains(PAULI_X)
    assert not alg.contains(np.eye(3))
    assert len(alg.generators()) == 4
    assert alg.commutant_constraints() == []


def test_span_of_diagonals():
    alg = SpanAlgebra([np.eye(2), PAULI_Z], name="diag")
    assert alg.contains(np.diag([3.0, -1.0]))
    assert not alg.contains(PAULI_X)
    assert len(alg.generators()) == 2


def test_graded_commutant_on_two_modes(lattice6):
    # F_a for the unit arc at site 0: generated by a_0, a_0*
    a = lattice6.poset.region(0)
    alg = lattice6.field_algebra(a)
    assert alg.contains(lattice6.annihilation(0))
    assert alg.contains(lattice6.majorana(0, "d"))
    assert not alg.contains(lattice6.annihilation(1))


def test_even_only_algebra_rejects_odd_operators():
    gamma = np.diag([1.0, -1.0]).astype(complex)
    alg = GradedCommutantAlgebra(gamma, [], name="even", even_only=True)
    assert alg.contains(np.diag([2.0, 5.0]))
    assert not alg.contains(PAULI_X)
    assert [c.shape for c in alg.commutant_constraints()] == [(2, 2)]


def test_commute_with_constraint():
    gamma = np.eye(2, dtype=complex)
    alg = GradedCommutantAlgebra(gamma, [], commute_with=[PAULI_Z])
    assert alg.contains(PAULI_Z)
    assert not alg.contains(PAULI_X)
