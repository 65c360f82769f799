# tests/test_homotopy.py
import numpy as np
import pytest
from hypothesis import given, strategies as st

from hnets.exceptions import DisconnectedPosetError, PathError, RelationViolation
from hnets.models import Path, Simplex1
from hnets.topology.homotopy import (HomotopyEngine, abelianization, are_homotopic, edge_windings, evaluate_hom,
                                     free_reduce, generator_loop, homotopy_engine, iter_loops, path_winding,
                                     path_word, pi1_presentation, random_deformation, reduce_path, standard_loop,
                                     trivial_hom)
from hnets.topology.poset_core import build_circle_base, build_custom


@pytest.mark.parametrize("name, rank", [("circle6", 1), ("circle8", 1), ("mincircle", 1), ("torus", 2)])
def test_abelianization_of_circles_and_torus(name, rank, request):
    poset = request.getfixturevalue(name)
    engine = HomotopyEngine(poset)
    assert abelianization(engine.presentation, engine.reduced) == (rank, [])


def test_minkowski_grid_is_simply_connected(cones):
    engine = HomotopyEngine(cones)
    assert engine.reduced.is_trivial
    assert abelianization(engine.presentation) == (0, [])


def test_circle_reduces_to_one_free_generator(circle6):
    engine = homotopy_engine(circle6)
    assert len(engine.reduced.generators) == 1
    assert engine.reduced.is_free
    assert engine.decisive


def test_torus_reduces_to_free_abelian(torus):
    engine = homotopy_engine(torus)
    assert engine.reduced.is_free_abelian
    assert engine.decisive


@pytest.mark.parametrize("name", ["mincircle", "circle6"])
def test_full_skeleton_presents_the_same_group(name, request):
    poset = request.getfixturevalue(name)
    nerve = HomotopyEngine(poset, skeleton="nerve")
    full = HomotopyEngine(poset, skeleton="full")
    assert full.presentation.skeleton == "full"
    assert abelianization(full.presentation, full.reduced) == abelianization(nerve.presentation, nerve.reduced)


def test_unknown_skeleton(mincircle):
    with pytest.raises(ValueError):
        pi1_presentation(mincircle, mincircle.regions[0], "cubical")


def test_disconnected_poset_has_no_presentation():
    p = build_custom("two", [0, 1], [])
    with pytest.raises(DisconnectedPosetError):
        pi1_presentation(p, p.region(0))


def test_free_reduce_cancels_inverse_pairs():
    assert free_reduce([(0, 1), (1, 1), (1, -1), (0, -1), (2, 1)]) == ((2, 1),)


def test_standard_loop_winds_once(circle6, mincircle):
    for poset in (circle6, mincircle):
        engine = homotopy_engine(poset)
        loop = standard_loop(poset)
        assert loop.is_loop
        windings = edge_windings(engine)
        assert path_winding(engine.presentation, windings, loop) == 1
        assert path_winding(engine.presentation, windings, loop.power(3)) == 3
        assert path_winding(engine.presentation, windings, loop.reverse()) == -1


def test_standard_loop_needs_a_circle(cones):
    with pytest.raises(PathError):
        standard_loop(cones)


def test_homotopy_decisions(circle6):
    engine = homotopy_engine(circle6)
    loop = standard_loop(circle6)
    trivial = Path.identity(loop.source)
    assert engine.are_homotopic(loop, loop) is True
    assert engine.are_homotopic(loop, trivial) is False
    assert engine.are_homotopic(loop.then(loop.reverse()), trivial) is True
    assert are_homotopic(loop.power(2), loop.then(loop), circle6) is True


def test_paths_with_different_ends_are_not_homotopic(circle6):
    a, b = circle6.region(0), circle6.region(6)
    step = Path.of(Simplex1(a, b, b))
    assert homotopy_engine(circle6).are_homotopic(step, Path.identity(a)) is False


@given(st.integers(min_value=0, max_value=2 ** 16), st.integers(min_value=-2, max_value=2))
def test_random_deformations_stay_homotopic(seed, k):
    poset = build_circle_base(6, 2)
    loop = standard_loop(poset).power(k)
    deformed = random_deformation(loop, poset, np.random.default_rng(seed), moves=5)
    assert deformed.source == loop.source and deformed.target == loop.target
    assert are_homotopic(loop, deformed, poset) is True


def test_normal_form_is_homotopic(mincircle):
    engine = homotopy_engine(mincircle)
    loop = standard_loop(mincircle)
    noisy = random_deformation(loop, mincircle, np.random.default_rng(3), moves=8)
    reduced = reduce_path(noisy, mincircle)
    assert engine.are_homotopic(reduced, loop) is True


def test_generator_loops_are_based(torus):
    pres = homotopy_engine(torus).presentation
    for k in range(pres.rank):
        loop = generator_loop(pres, k)
        assert loop.source == pres.basepoint and loop.is_loop
        assert path_word(pres, loop) == ((k, 1),)


def test_iter_loops_finds_the_circle(mincircle):
    engine = homotopy_engine(mincircle)
    windings = edge_windings(engine)
    base = mincircle.regions[0]
    found = {path_winding(engine.presentation, windings, loop) for loop in iter_loops(mincircle, base, 4)}
    assert {-1, 0, 1} <= found


def test_evaluate_hom_checks_relations():
    chain = build_custom("chain", [0, 1, 2], [(0, 1), (1, 2)])
    pres = homotopy_engine(chain).presentation
    assert pres.rank == 1 and len(pres.relations) == 1
    assert evaluate_hom(pres, [np.eye(2, dtype=complex)]).is_trivial()
    with pytest.raises(RelationViolation):
        evaluate_hom(pres, [np.array([[0, 1], [1, 0]], dtype=complex)])


def test_trivial_hom_on_the_torus(torus):
    pres = homotopy_engine(torus).presentation
    hom = trivial_hom(pres, 2)
    assert hom.dim == 2 and hom.is_trivial()
    hom.check_relations()
