# tests/test_twistkit.py
from fractions import Fraction

import numpy as np
import pytest

from hnets.exceptions import FluxError, NormalizerError, PathError
from hnets.gauge.twistkit import (_check_equivalence_family, ab_twist, bmt_twist, check_normalizer,
                                  potential_from_flux, twist_field_net, untwisted_system, winding_hom)
from hnets.gauge.twistkit import test_equivalence as equivalence_check
from hnets.sectors.lattice import LatticeFieldNet
from hnets.topology.homotopy import homotopy_engine, standard_loop, trivial_hom
from hnets.topology.simplicial import build_path_frame


@pytest.fixture(scope="module")
def fermions():
    return LatticeFieldNet(5, gauge_n=1)


@pytest.fixture(scope="module")
def fermions_z4():
    return LatticeFieldNet(5, gauge_n=2)


def test_normalizer_check(fermions):
    system = untwisted_system(fermions)
    check_normalizer(system, fermions.parity)
    check_normalizer(system, fermions.gauge_unitary(1))
    with pytest.raises(NormalizerError):
        check_normalizer(system, fermions.majorana(0), label="c0")


def test_trivial_twist_is_equivalent(fermions):
    base = untwisted_system(fermions)
    poset = fermions.poset
    frame = build_path_frame(poset, poset.regions[0])
    chi = trivial_hom(homotopy_engine(poset).presentation, fermions.dim)
    twisted = twist_field_net(base, chi, frame)
    assert all(r.passed for r in twisted.reports)
    result = equivalence_check(base, twisted, frame)
    assert result.verdict == "equivalent"
    assert result.witness is not None


def test_twist_rejects_foreign_holonomy(fermions, circle6):
    chi = trivial_hom(homotopy_engine(circle6).presentation, fermions.dim)
    frame = build_path_frame(fermions.poset, fermions.poset.regions[0])
    with pytest.raises(PathError):
        twist_field_net(untwisted_system(fermions), chi, frame)


@pytest.mark.parametrize("kappa,winding,phase", [(1, 1, 1j), (1, 2, -1), (2, 1, -1)])
def test_bmt_phase(fermions_z4, kappa, winding, phase):
    system, report = bmt_twist(fermions_z4, kappa=kappa, winding=winding)
    assert report.law == "bmt-phase"
    assert report.passed
    assert np.isclose(np.exp(1j * np.pi * kappa * winding / 2), phase)


def test_bmt_twist_is_a_consistent_inequivalent_system(fermions_z4):
    system, _ = bmt_twist(fermions_z4)
    assert all(r.passed for r in system.reports)
    result = equivalence_check(untwisted_system(fermions_z4), system)
    assert result.verdict == "inequivalent"
    assert "not conjugate" in result.obstruction


def test_potential_from_flux(circle6):
    pot = potential_from_flux(circle6, Fraction(1, 3))
    assert pot.verify().passed
    assert pot.loop_sum(standard_loop(circle6)) == Fraction(1, 3)
    assert np.isclose(pot.character(standard_loop(circle6)), np.exp(2j * np.pi / 3))
    assert pot.loop_sum(standard_loop(circle6).power(-2)) == Fraction(-2, 3)


@pytest.mark.parametrize("name", ["cones", "torus"])
def test_potential_needs_a_circle(name, request):
    with pytest.raises(FluxError):
        potential_from_flux(request.getfixturevalue(name), Fraction(1, 2))


@pytest.mark.parametrize("model_name,theta,winding", [("fermions", Fraction(1, 2), 1),
                                                      ("fermions_z4", Fraction(1, 4), 2)])
def test_ab_phase(model_name, theta, winding, request):
    model = request.getfixturevalue(model_name)
    system, phase = ab_twist(model, potential_from_flux(model.poset, theta), winding)
    assert phase.report.passed
    assert abs(phase.expected + 1) < 1e-9
    assert abs(phase.measured + 1) < 1e-9
    assert all(r.passed for r in system.reports)


def test_ab_flux_must_fit_the_gauge_group(fermions):
    with pytest.raises(FluxError):
        ab_twist(fermions, potential_from_flux(fermions.poset, Fraction(1, 4)))


def test_winding_hom_on_a_plain_poset(circle6):
    chi = winding_hom(circle6, np.array([[1j]]), 1)
    chi.check_relations()
    assert np.isclose(chi.evaluate(standard_loop(circle6))[0, 0], 1j)
    assert np.isclose(chi.evaluate(standard_loop(circle6).power(3))[0, 0], -1j)


def test_bmt_twist_fixes_the_observable_net(fermions_z4):
    system, _ = bmt_twist(fermions_z4, kappa=1, winding=1)
    fixed = next(r for r in system.reports if r.law == "observable-net-fixed")
    assert fixed.checked > 0
    assert fixed.passed


@pytest.fixture(scope="module")
def reframed(fermions_z4):
    """One nontrivial holonomy twisted under frames at three different poles."""
    base = untwisted_system(fermions_z4)
    poset = fermions_z4.poset
    chi = winding_hom(fermions_z4, fermions_z4.gauge_unitary(1), fermions_z4.dim)
    frames = [build_path_frame(poset, poset.regions[k]) for k in (0, 2, 4)]
    return [twist_field_net(base, chi, frame) for frame in frames], frames[0]


def test_reframed_twists_are_equivalent(reframed):
    (first, second, _), frame = reframed
    assert all(r.passed for r in second.reports)
    result = equivalence_check(first, second, frame)
    assert result.verdict == "equivalent"
    assert _check_equivalence_family(first, second, result.witness, 1e-9)


def test_equivalence_is_reflexive_and_symmetric(reframed, fermions_z4):
    (first, second, _), frame = reframed
    assert equivalence_check(first, first, frame).verdict == "equivalent"
    assert equivalence_check(second, first, frame).verdict == "equivalent"
    base = untwisted_system(fermions_z4)
    assert equivalence_check(base, first, frame).verdict == "inequivalent"
    assert equivalence_check(first, base, frame).verdict == "inequivalent"


def test_equivalence_is_transitive(reframed):
    (first, second, third), frame = reframed
    nu12 = equivalence_check(first, second, frame).witness
    nu23 = equivalence_check(second, third, frame).witness
    assert equivalence_check(first, third, frame).verdict == "equivalent"
    composed = {a: nu23[a] @ nu12[a] for a in first.poset.regions}
    assert _check_equivalence_family(first, third, composed, 1e-9)
