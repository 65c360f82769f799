# tests/test_simplicial.py
import pytest
from hypothesis import given, strategies as st

from hnets.exceptions import DisconnectedPosetError, PosetError
from hnets.models import Path, Simplex1
from hnets.topology.poset_core import build_circle_base, build_custom
from hnets.topology.simplicial import (build_path_frame, check_face_relations, check_simplex1, enumerate_simplices,
                                       nerve_subsets, simplicial_report)


def test_counts_on_the_minimal_circle(mincircle):
    assert len(enumerate_simplices(mincircle, 0)) == 4
    # |below(s)|^2 summed over supports: 1 + 1 + 9 + 9
    assert len(enumerate_simplices(mincircle, 1)) == 20
    n1, n2 = nerve_subsets(mincircle)
    assert len(n1) == 8
    assert len(n2) == 12


def test_degree_out_of_range(mincircle):
    with pytest.raises(PosetError):
        enumerate_simplices(mincircle, 3)


def test_enumeration_is_sorted_and_includes_degenerates(mincircle):
    sigma1 = enumerate_simplices(mincircle, 1)
    assert [b.key for b in sigma1] == sorted(b.key for b in sigma1)
    for r in mincircle.regions:
        assert Simplex1(r, r, r) in sigma1


@pytest.mark.parametrize("name", ["mincircle", "circle6", "torus"])
def test_every_triangle_satisfies_the_face_identities(name, request):
    poset = request.getfixturevalue(name)
    for c in enumerate_simplices(poset, 2):
        assert check_face_relations(poset, c) == []


def test_nerve_simplices_are_simplices(circle6):
    sigma1 = set(enumerate_simplices(circle6, 1))
    sigma2 = set(enumerate_simplices(circle6, 2))
    n1, n2 = nerve_subsets(circle6)
    assert set(n1) <= sigma1
    assert set(n2) <= sigma2
    assert all(b.is_inclusion for b in n1)


def test_check_simplex1_reports_bad_supports(mincircle):
    w, e, n, s = mincircle.regions
    assert check_simplex1(mincircle, Simplex1(w, e, n)) == []
    problems = check_simplex1(mincircle, Simplex1(n, w, s))
    assert problems and "not below support" in problems[0]


def test_report_matches_enumeration(mincircle):
    report = simplicial_report(mincircle)
    assert report["degrees"]["0"]["total"] == 4
    assert report["degrees"]["1"]["total"] == len(enumerate_simplices(mincircle, 1))
    assert report["degrees"]["2"]["total"] == len(enumerate_simplices(mincircle, 2))
    assert report["degrees"]["1"]["degenerate"] == 4
    assert report["nerve"] == {"N1": 8, "N2": 12}
    assert report["degrees"]["2"]["inclusion"] == 12
    assert report["connected"] is True


@given(st.integers(min_value=0, max_value=11))
def test_path_frame_reaches_every_region(pole_id):
    poset = build_circle_base(6, 2)
    pole = poset.region(pole_id)
    frame = build_path_frame(poset, pole)
    assert frame.pole == pole
    assert frame.path_to(pole).word == ((Simplex1(pole, pole, pole), 1),)
    for r in poset.regions:
        path = frame.path_to(r)
        assert isinstance(path, Path)
        assert path.source == pole and path.target == r
        assert frame.path_from(r).target == pole


def test_path_frame_on_disconnected_poset():
    p = build_custom("two", [0, 1], [])
    with pytest.raises(DisconnectedPosetError):
        build_path_frame(p, p.region(0))
