# tests/test_gerbekit.py
import numpy as np
import pytest

from hnets.algebra.groupkit import PAULI_X
from hnets.exceptions import GroupError, LiftChoiceError
from hnets.gauge.gerbekit import (LiftProblem, check_cstar_gerbe, check_gerbe_relation, circle_projective_holonomy,
                                  classify_lifts, commutator_obstruction, delta_class_trivial, domain_simplices,
                                  flavour_family, gerbe_from_cochain, gerbe_from_projective,
                                  pauli_projective_holonomy, recoordinatize)
from hnets.topology.poset_core import build_custom
from hnets.topology.simplicial import build_path_frame


@pytest.fixture(scope="module")
def torus_gerbe():
    chibar, data, product = pauli_projective_holonomy()
    frame = build_path_frame(product, product.regions[0])
    gerbe, lifts = gerbe_from_projective(chibar, frame, data)
    return chibar, data, product, frame, gerbe, lifts


@pytest.fixture(scope="module")
def circle_gerbe():
    chibar, data, base = circle_projective_holonomy()
    frame = build_path_frame(base, base.regions[0])
    gerbe, lifts = gerbe_from_projective(chibar, frame, data)
    return data, base, gerbe, lifts


def test_torus_gerbe_is_consistent_but_not_a_bundle(torus_gerbe):
    _, data, _, _, gerbe, lifts = torus_gerbe
    assert check_gerbe_relation(gerbe).passed
    assert not gerbe.is_group_bundle()
    reports = check_cstar_gerbe(gerbe, flavour_family(gerbe, lifts, data))
    assert [r.law for r in reports] == ["gerbe-net-relation", "gerbe-equivariance", "fixed-point-net"]
    assert all(r.passed for r in reports)


def test_torus_delta_class_is_nontrivial(torus_gerbe):
    assert delta_class_trivial(torus_gerbe[4]) is False


def test_torus_lifts_are_obstructed(torus_gerbe):
    _, data, product, _, _, lifts = torus_gerbe
    result = classify_lifts(LiftProblem.from_lifts(product, data, lifts))
    assert result.status == "empty"
    assert result.solutions == []
    minus_one = data.ambient.index_of(-np.eye(2))
    obstruction = commutator_obstruction(data, data.coset_by_label("[X]"), data.coset_by_label("[Z]"))
    assert obstruction.obstructed
    assert obstruction.commutators == [minus_one]


def test_commuting_classes_are_not_obstructed(torus_gerbe):
    data = torus_gerbe[1]
    x = data.coset_by_label("[X]")
    assert not commutator_obstruction(data, x, x).obstructed


def test_circle_gerbe_lifts(circle_gerbe):
    data, base, gerbe, lifts = circle_gerbe
    assert check_gerbe_relation(gerbe).passed
    assert delta_class_trivial(gerbe) is True
    result = classify_lifts(LiftProblem.from_lifts(base, data, lifts))
    assert result.status == "solutions"
    assert result.solutions


def test_search_budget_gives_undecided(circle_gerbe):
    data, base, _, lifts = circle_gerbe
    result = classify_lifts(LiftProblem.from_lifts(base, data, lifts), bound=0)
    assert result.status == "undecided"


def test_recoordinatization_keeps_the_relation(torus_gerbe):
    gerbe = torus_gerbe[4]
    grp = gerbe.group
    same = recoordinatize(gerbe, {b: grp.identity_index for b in gerbe.i})
    assert same.delta == gerbe.delta
    rng = np.random.default_rng(3)
    moved = recoordinatize(gerbe, {b: int(rng.integers(grp.order)) for b in gerbe.i})
    assert check_gerbe_relation(moved).passed
    assert delta_class_trivial(moved) is False


def test_gerbe_from_cochain_matches(torus_gerbe):
    _, data, product, _, gerbe, lifts = torus_gerbe
    assert gerbe_from_cochain(lifts, data, product).delta == gerbe.delta


def test_random_lifts_give_the_same_class(torus_gerbe):
    chibar, data, _, frame, _, _ = torus_gerbe
    gerbe, _ = gerbe_from_projective(chibar, frame, data, "random", rng=np.random.default_rng(11))
    assert check_gerbe_relation(gerbe).passed
    assert delta_class_trivial(gerbe) is False


def test_full_domain(circle_gerbe):
    data, base, _, _ = circle_gerbe
    chibar, _, _ = circle_projective_holonomy(base)
    gerbe, lifts = gerbe_from_projective(chibar, build_path_frame(base, base.regions[0]), data, domain="full")
    assert check_gerbe_relation(gerbe).passed
    with pytest.raises(ValueError):
        check_cstar_gerbe(gerbe, flavour_family(gerbe, lifts, data))
    with pytest.raises(ValueError):
        domain_simplices(base, "skeleton")


def test_lift_choice_errors(torus_gerbe):
    chibar, data, _, frame, _, lifts = torus_gerbe
    with pytest.raises(LiftChoiceError):
        gerbe_from_projective(chibar, frame, data, "greedy")
    partial = dict(lifts)
    partial.pop(next(iter(partial)))
    with pytest.raises(LiftChoiceError):
        gerbe_from_projective(chibar, frame, data, partial)
    moved = dict(lifts)
    b = next(b for b, n in lifts.items() if not data.in_normal(n))
    moved[b] = data.ambient.identity_index
    with pytest.raises(LiftChoiceError):
        gerbe_from_projective(chibar, frame, data, moved)


def test_lift_problem_rejects_cochains_outside_the_normal_subgroup(pauli):
    _, data = pauli
    chain = build_custom("chain", [0, 1, 2], [(0, 1), (1, 2)])
    r0, r1, r2 = chain.regions
    one, x = data.ambient.identity_index, data.ambient.index_of(PAULI_X)
    prob = LiftProblem(chain, data, {(r0, r1): x, (r1, r2): one, (r0, r2): one})
    with pytest.raises(GroupError):
        prob.verify()
