# tests/test_calculations.py
from fractions import Fraction

import numpy as np
import pytest

from hnets.algebra.groupkit import PAULI_X, PAULI_Y, PAULI_Z
from hnets.utils.calculations import (MatrixValidator, bracket, conjugate_by, distance, intertwiner_space,
                                      is_unitary, matrix_key, ordered_product, polar_unitary, scalar_value,
                                      summarize_residuals, unit_phase_fraction)


def test_scalar_value():
    assert scalar_value(2j * np.eye(3)) == 2j
    assert scalar_value(PAULI_Z) is None


def test_brackets():
    assert distance(bracket(PAULI_X, PAULI_Z), -2j * PAULI_Y) < 1e-12
    assert distance(bracket(PAULI_X, PAULI_Z, anti=True), np.zeros((2, 2))) < 1e-12
    assert distance(conjugate_by(PAULI_X, PAULI_Z), -PAULI_Z) < 1e-12


def test_ordered_product_applies_first_factor_first():
    a = np.array([[1, 1], [0, 1]], dtype=complex)
    assert distance(ordered_product([a, PAULI_X], 2), PAULI_X @ a) < 1e-12
    assert distance(ordered_product([], 2), np.eye(2)) < 1e-12


def test_matrix_key_ignores_tiny_noise():
    assert matrix_key(PAULI_X) == matrix_key(PAULI_X + 1e-12)
    assert matrix_key(PAULI_X) != matrix_key(PAULI_Z)


def test_polar_unitary():
    u = polar_unitary(3 * PAULI_X)
    assert is_unitary(u)
    assert distance(u, PAULI_X) < 1e-12


def test_intertwiner_space_commutant_of_x():
    basis = intertwiner_space([PAULI_X], [PAULI_X])
    assert len(basis) == 2
    for m in basis:
        assert distance(m @ PAULI_X, PAULI_X @ m) < 1e-9


def test_intertwiner_space_twisted():
    basis = intertwiner_space([PAULI_Z], [-PAULI_Z])
    assert len(basis) == 2
    for m in basis:
        assert distance(m @ PAULI_Z, -PAULI_Z @ m) < 1e-9


def test_intertwiner_space_arguments():
    with pytest.raises(ValueError):
        intertwiner_space([], [])
    with pytest.raises(ValueError):
        intertwiner_space([PAULI_X], [PAULI_X, PAULI_Z])
    with pytest.raises(ValueError):
        intertwiner_space([np.eye(4)], [np.eye(4)], max_dim=2)


@pytest.mark.parametrize("phase,turns", [(-1, Fraction(1, 2)), (1j, Fraction(1, 4)), (1, Fraction(0)),
                                         (np.exp(2j * np.pi / 3), Fraction(1, 3)), (-1j, Fraction(3, 4))])
def test_unit_phase_fraction(phase, turns):
    assert unit_phase_fraction(phase) == turns


def test_summarize_residuals():
    records = [{"law": "a", "residual": 1.0}, {"law": "a", "residual": 3.0}, {"law": "b", "residual": 0.5}]
    summary = summarize_residuals(records)
    assert list(summary) == ["a", "b"]
    assert summary["a"] == {"count": 2, "max": 3.0, "mean": 2.0}
    assert summarize_residuals([]) == {}


def test_matrix_validator():
    assert MatrixValidator.validate_square(PAULI_X, 2)
    assert not MatrixValidator.validate_square(np.ones((2, 3)))
    assert not MatrixValidator.validate_square(PAULI_X, 3)
    assert MatrixValidator.validate_unitary(PAULI_Y)
    assert not MatrixValidator.validate_unitary(2 * PAULI_Y)
    assert MatrixValidator.validate_self_adjoint(PAULI_Y)
    assert not MatrixValidator.validate_self_adjoint(1j * PAULI_Y)
