# tests/test_groupkit.py
import numpy as np
import pytest
from hypothesis import given, strategies as st

from hnets.algebra.groupkit import (PAULI_X, PAULI_Z, FiniteGroup, GradedGroup, automorphism_of,
                                    make_cyclic_phase_group, make_direct_product, make_symmetric_group,
                                    normalizer_quotient)
from hnets.exceptions import GroupError, NotNormalError


def test_pauli_group_structure(pauli):
    graded, data = pauli
    amb = data.ambient
    assert amb.order == 16
    assert not amb.is_abelian()
    assert data.normal.order == 4
    assert len(data.cosets) == 4
    quotient = data.quotient_group()
    assert quotient.order == 4 and quotient.is_abelian()
    # Z2 x Z2: every non-identity class has order two
    assert sorted(quotient.element_order(q) for q in range(4)) == [1, 2, 2, 2]
    assert amb.verify() == []
    assert graded.group.matrix(graded.gamma) == pytest.approx(-np.eye(2))


def test_pauli_labels(pauli):
    _, data = pauli
    amb = data.ambient
    assert amb.label(amb.index_of(PAULI_X)) == "X"
    assert amb.label(amb.index_of(-1j * PAULI_Z)) == "-iZ"
    assert amb.label(amb.identity_index) == "1"


def test_coset_by_label(pauli):
    _, data = pauli
    amb = data.ambient
    qx = data.coset_by_label("[X]")
    assert qx == data.coset_by_label("X") == data.coset_by_label("-iX")
    assert qx != data.coset_by_label("[Z]")
    assert data.coset_by_label("[1]") == data.project(amb.identity_index)
    with pytest.raises(GroupError):
        data.coset_by_label("[W]")


def test_x_and_z_commute_up_to_minus_one(pauli):
    _, data = pauli
    amb = data.ambient
    x, z = amb.index_of(PAULI_X), amb.index_of(PAULI_Z)
    commutator = amb.mul(amb.mul(x, z), amb.mul(amb.inverse(x), amb.inverse(z)))
    assert amb.matrix(commutator) == pytest.approx(-np.eye(2))
    assert data.in_normal(commutator)


def test_centre_acts_trivially(pauli):
    _, data = pauli
    amb = data.ambient
    for n in range(amb.order):
        assert automorphism_of(amb, data, n) == list(range(data.normal.order))


@given(st.integers(min_value=1, max_value=12), st.integers(min_value=1, max_value=3))
def test_cyclic_phase_groups(n, d):
    g = make_cyclic_phase_group(n, d)
    assert g.order == n and g.dim == d
    assert g.is_abelian()
    assert g.verify() == []
    if n > 1:
        assert g.element_order(1) == n
        assert g.power(1, -1) == n - 1


@pytest.mark.parametrize("n, order", [(1, 1), (3, 6), (4, 24)])
def test_symmetric_groups(n, order):
    g = make_symmetric_group(n)
    assert g.order == order
    assert g.verify() == []
    assert g.is_abelian() == (n < 3)


def test_symmetric_group_size_limit():
    with pytest.raises(GroupError):
        make_symmetric_group(7)


def test_alternating_subgroup_is_normal():
    s3 = make_symmetric_group(3)
    even = [k for k in range(s3.order) if np.real(np.linalg.det(s3.matrix(k))) > 0]
    data = normalizer_quotient(s3, even)
    assert data.normal.order == 3
    assert data.quotient_group().order == 2


def test_non_normal_subgroup_is_rejected():
    s3 = make_symmetric_group(3)
    swap = s3.labels.index("102")
    with pytest.raises(NotNormalError):
        normalizer_quotient(s3, [s3.identity_index, swap])


def test_not_a_subgroup():
    s3 = make_symmetric_group(3)
    with pytest.raises(GroupError):
        normalizer_quotient(s3, [s3.labels.index("102")])


def test_direct_product():
    g = make_direct_product(make_cyclic_phase_group(2), make_cyclic_phase_group(3))
    assert g.order == 6 and g.dim == 2
    assert g.is_abelian()
    assert g.verify() == []


def test_tables_must_have_an_identity():
    with pytest.raises(GroupError):
        FiniteGroup("broken", np.array([[1, 0], [1, 0]]))


def test_grading_must_be_central():
    s3 = make_symmetric_group(3)
    with pytest.raises(GroupError):
        GradedGroup(s3, s3.labels.index("102"))


def test_generated_by_rejects_non_unitary():
    with pytest.raises(GroupError):
        FiniteGroup.generated_by("bad", [2 * np.eye(2)])


def test_abstract_quotient_has_no_matrices(pauli):
    _, data = pauli
    with pytest.raises(GroupError):
        data.quotient_group().matrix(0)
