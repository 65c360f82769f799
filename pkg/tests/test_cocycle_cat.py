# tests/test_cocycle_cat.py
import numpy as np
import pytest

from hnets.algebra.groupkit import PAULI_X, PAULI_Y, PAULI_Z
from hnets.exceptions import CoverageError, IncompatibleFamilyError, PathError, PosetError
from hnets.models import Simplex1
from hnets.sectors.cocycle_cat import (Cocycle, CocycleArrow, arrow_space, check_arrow, check_cocycle,
                                       compose_arrows, evaluate_path, glue_sections, restrict_cocycle,
                                       restrict_local, sector_bundle, sector_holonomy)
from hnets.sectors.sector_stats import winding_character
from hnets.topology.homotopy import homotopy_engine, standard_loop
from hnets.topology.simplicial import enumerate_simplices
from hnets.utils.calculations import distance

PAULIS = [PAULI_X, PAULI_Z, PAULI_Y, np.eye(2, dtype=complex)]


def flux(poset, phase=1j):
    char = winding_character(poset, phase)
    return Cocycle.from_function(poset, lambda b: char(b) * np.eye(1), dim=1, name="flux")


def laws(reports):
    return {r.law: r.passed for r in reports}


def test_identity_cocycle(circle6):
    z = Cocycle.identity(circle6, 2)
    reports = check_cocycle(z)
    assert laws(reports) == {"cocycle-identity": True, "unitarity": True, "locality": True}
    assert reports[2].notes
    assert sector_holonomy(z, homotopy_engine(circle6).presentation).is_trivial()


def test_cocycle_needs_values():
    with pytest.raises(ValueError):
        Cocycle(None)


def test_coboundary_is_a_cocycle_with_trivial_holonomy(circle6):
    family = {a: PAULIS[a.id % 4] for a in circle6.regions}
    z = Cocycle.coboundary(circle6, family)
    assert z.dim == 2
    assert all(r.passed for r in check_cocycle(z))
    assert sector_holonomy(z, homotopy_engine(circle6).presentation).is_trivial()
    arrows = arrow_space(Cocycle.identity(circle6, 2), z)
    assert len(arrows) == 4
    for t in arrows:
        assert all(r.passed for r in check_arrow(t))


def test_flux_cocycle_holonomy(circle6):
    z = flux(circle6)
    assert all(r.passed for r in check_cocycle(z))
    assert abs(evaluate_path(z, standard_loop(circle6))[0, 0] - 1j) < 1e-12
    assert not sector_holonomy(z, homotopy_engine(circle6).presentation).is_trivial()


def test_flux_sector_bundle_carries_the_holonomy(circle6):
    nb = sector_bundle(flux(circle6))
    assert nb.verify().passed
    assert abs(nb.transport(standard_loop(circle6))[0, 0] - 1j) < 1e-12


def test_flux_arrow_spaces(circle6):
    z = flux(circle6)
    assert arrow_space(z, Cocycle.identity(circle6, 1)) == []
    self_arrows = arrow_space(z, z)
    assert len(self_arrows) == 1
    assert all(r.passed for r in check_arrow(self_arrows[0]))


def test_broken_value_is_detected(circle6):
    a = circle6.region(0)
    bad = Cocycle.identity(circle6, 1).with_values({Simplex1(a, a, a): -np.eye(1)})
    assert laws(check_cocycle(bad))["cocycle-identity"] is False


def test_evaluate_path_rejects_foreign_regions(circle6, circle8):
    with pytest.raises(PathError):
        evaluate_path(Cocycle.identity(circle6, 1), standard_loop(circle8))


def test_restriction(circle6):
    z = flux(circle6)
    a = circle6.region(6)  # a0+2
    obj = restrict_cocycle(z, a)
    assert obj.region == a
    assert sorted(r.id for r in obj.poset.regions) == [0, 1]
    for b in enumerate_simplices(obj.poset, 1):
        assert distance(obj.cocycle(b), z(b)) < 1e-12
    with pytest.raises(PosetError):
        restrict_cocycle(z, circle6.region(0))
    with pytest.raises(PosetError):
        restrict_local(obj, circle6.region(0))


def test_restrict_local_to_smaller_region(circle8):
    z = flux(circle8)
    big = circle8.region(16)  # a0+3
    obj = restrict_cocycle(z, big)
    smaller = restrict_local(obj, circle8.region(8))  # a0+2
    assert sorted(r.id for r in smaller.poset.regions) == [0, 1]


def test_gluing_restrictions_recovers_the_cocycle(circle8):
    z = flux(circle8)
    family = {a: restrict_cocycle(z, a) for a in circle8.regions if a.payload[2] == 3}
    glued = glue_sections(family, circle8)
    assert len(glued.poset) == 16
    assert all(r.passed for r in check_cocycle(glued))
    for b in enumerate_simplices(glued.poset, 1):
        assert distance(glued(b), z(b)) < 1e-12
    with pytest.raises(CoverageError):
        glue_sections(family, circle8, target=circle8)


def test_incompatible_family(circle6):
    a1 = circle6.region(1)
    bad = Cocycle.identity(circle6, 1).with_values({Simplex1(a1, a1, a1): -np.eye(1)})
    family = {circle6.region(6): restrict_cocycle(Cocycle.identity(circle6, 1), circle6.region(6)),
              circle6.region(7): restrict_cocycle(bad, circle6.region(7))}
    with pytest.raises(IncompatibleFamilyError):
        glue_sections(family, circle6)


def test_arrow_composition(circle6):
    z = flux(circle6)
    ident = CocycleArrow.identity(z)
    assert all(r.passed for r in check_arrow(ident))
    twice = compose_arrows(ident, ident)
    assert distance(twice[circle6.region(3)], np.eye(1)) < 1e-12
    other = CocycleArrow.identity(Cocycle.identity(circle6, 1))
    with pytest.raises(ValueError):
        compose_arrows(other, ident)
