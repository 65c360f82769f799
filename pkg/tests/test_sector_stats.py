# tests/test_sector_stats.py
from fractions import Fraction

import numpy as np
import pytest

from hnets.exceptions import ChargeError, GeometryError
from hnets.sectors.cocycle_cat import CocycleArrow, check_arrow, check_cocycle, sector_holonomy
from hnets.sectors.lattice import LatticeFieldNet
from hnets.sectors.sector_stats import (ChargedCocycle, LocalizedCharge, admissible_geometries, ambient_regions,
                                        charge_cocycle, charge_from_cocycle, charge_localization_check,
                                        charge_pair_check, check_haag_kastler, choice_independence_check,
                                        choice_independence_sweep, compare_charge_from_cocycle,
                                        intertwiner_relation_check, majorana_charges, majorana_transfer_arrow,
                                        restriction_preserves_symmetry, run_fermi_statistics, sector_cocycle,
                                        statistics_phase, tensor_arrows, tensor_cocycles, validate_charge,
                                        verify_conjugate, verify_symmetry_relations)
from hnets.topology.homotopy import homotopy_engine
from hnets.utils.calculations import distance


@pytest.fixture(scope="module")
def majorana(lattice6):
    return charge_cocycle(lattice6, majorana_charges(lattice6))


def test_majorana_charges_are_valid(lattice6):
    for charge in majorana_charges(lattice6, end="last").values():
        validate_charge(lattice6, charge)
    with pytest.raises(ValueError):
        majorana_charges(lattice6, end="middle")


@pytest.mark.parametrize("make", [
    lambda m: np.eye(m.dim, dtype=complex),
    lambda m: 2 * m.majorana(0),
    lambda m: m.majorana(3),
])
def test_invalid_charges(lattice6, make):
    with pytest.raises(ChargeError):
        validate_charge(lattice6, LocalizedCharge(lattice6.poset.region(0), make(lattice6)))


def test_charge_cocycle_needs_parity_gauge_group():
    model = LatticeFieldNet(5, gauge_n=2)
    with pytest.raises(ChargeError):
        charge_cocycle(model, majorana_charges(model))


def test_charge_cocycle_needs_every_region(lattice6):
    charges = majorana_charges(lattice6)
    charges.pop(lattice6.poset.region(4))
    with pytest.raises(ChargeError):
        charge_cocycle(lattice6, charges)


def test_majorana_cocycle_laws(majorana, lattice6):
    assert all(r.passed for r in check_cocycle(majorana.cocycle))
    assert charge_pair_check(majorana, lattice6).passed
    assert charge_localization_check(majorana, lattice6).passed


def test_majorana_holonomy_is_trivial_unless_twisted(majorana, lattice6):
    pres = homotopy_engine(lattice6.poset).presentation
    assert sector_holonomy(majorana.cocycle, pres).is_trivial()
    twisted = charge_cocycle(lattice6, majorana_charges(lattice6), twist=-1)
    hol = sector_holonomy(twisted.cocycle, pres)
    assert not hol.is_trivial()
    for m in hol.images:
        assert distance(m @ m, np.eye(lattice6.dim)) < 1e-9


def test_majorana_statistics_is_fermionic(majorana):
    result = statistics_phase(majorana)
    assert abs(result.phase + 1) < 1e-9
    assert result.fraction == Fraction(1, 2)
    assert result.scalar and result.uniform


def test_vacuum_and_square_are_bosonic(majorana, lattice6):
    vacuum = ChargedCocycle.vacuum(lattice6.poset, lattice6.dim, lattice6.observable_algebras)
    assert abs(statistics_phase(vacuum).phase - 1) < 1e-9
    square = tensor_cocycles(majorana, majorana)
    assert abs(statistics_phase(square).phase - 1) < 1e-9


def test_symmetry_operator_geometry(majorana, lattice6):
    poset = lattice6.poset
    assert choice_independence_check(majorana, majorana, poset.region(0), poset.region(12)).passed
    with pytest.raises(GeometryError):
        admissible_geometries(poset, poset.region(3), poset.region(12))
    assert restriction_preserves_symmetry(majorana, majorana).passed


def test_transfer_arrow_between_majorana_families(majorana, lattice6):
    last = charge_cocycle(lattice6, majorana_charges(lattice6, end="last"))
    t = majorana_transfer_arrow(majorana, last)
    assert all(r.passed for r in check_arrow(t))
    assert intertwiner_relation_check(t, majorana, last, lattice6).passed


def test_tensor_of_identity_arrows(majorana):
    one = CocycleArrow.identity(majorana.cocycle)
    both = tensor_arrows(one, one, majorana)
    for m in both.components.values():
        assert distance(m, np.eye(majorana.dim)) < 1e-12


def test_charge_from_cocycle(majorana, lattice6):
    poset = lattice6.poset
    e, o = poset.region(0), poset.region(3)
    assert compare_charge_from_cocycle(majorana, lattice6, e, o).passed
    with pytest.raises(GeometryError):
        charge_from_cocycle(majorana, e, poset.region(1))


def test_haag_kastler_properties(lattice6):
    reports = check_haag_kastler(lattice6)
    assert [r.law for r in reports] == ["isotony", "einstein-causality", "gauge-covariance",
                                        "normal-commutation", "irreducibility"]
    assert all(r.passed for r in reports)


@pytest.mark.parametrize("sector,phase", [("majorana", -1), ("vacuum", 1), ("majorana-square", 1)])
def test_run_fermi_statistics(lattice6, sector, phase):
    result = run_fermi_statistics(lattice6, sector)
    assert abs(result["statistics"].phase - phase) < 1e-9
    for key in ("cocycle", "choice", "symmetry", "conjugate"):
        assert all(r.passed for r in result[key]), key
    naturality = next(r for r in result["symmetry"] if r.law == "symmetry-naturality")
    assert naturality.checked > 0


def test_unknown_sector(lattice6):
    with pytest.raises(ChargeError):
        run_fermi_statistics(lattice6, "anyon")
    with pytest.raises(ChargeError):
        sector_cocycle(lattice6, "anyon")


def test_choice_independence_over_every_ambient_region(majorana, lattice6):
    poset = lattice6.poset
    report = choice_independence_sweep(majorana, majorana)
    assert report.passed
    geometries = sum(len(admissible_geometries(poset, e, a))
                     for e in poset.regions for a in ambient_regions(poset, e))
    assert report.checked == geometries == 60
    assert statistics_phase(majorana).choice.passed


def test_naturality_along_the_transfer_arrow(majorana, lattice6):
    last = charge_cocycle(lattice6, majorana_charges(lattice6, end="last"))
    t = majorana_transfer_arrow(majorana, last)
    reports = verify_symmetry_relations(majorana, majorana, arrows=[(t, last, t, last)])
    naturality = next(r for r in reports if r.law == "symmetry-naturality")
    assert naturality.checked > 0
    assert all(r.passed for r in reports)


def test_naturality_without_arrows_does_not_pass(majorana):
    reports = verify_symmetry_relations(majorana, majorana)
    naturality = next(r for r in reports if r.law == "symmetry-naturality")
    assert not naturality.passed
    assert naturality.first_witness == "arrows"


def test_naturality_rejects_an_arrow_into_the_wrong_sector(majorana, lattice6):
    vacuum = ChargedCocycle.vacuum(lattice6.poset, lattice6.dim, lattice6.observable_algebras)
    one = CocycleArrow.identity(vacuum.cocycle)
    reports = verify_symmetry_relations(majorana, majorana, arrows=[(one, vacuum, one, vacuum)])
    naturality = next(r for r in reports if r.law == "symmetry-naturality")
    assert not naturality.passed
    assert naturality.max_residual > 1


@pytest.mark.parametrize("r_scale,rbar_scale,passes", [(1, 1, True), (-1, -1, True), (2, 1, False), (-1, 1, False)])
def test_conjugate_equations(majorana, lattice6, r_scale, rbar_scale, passes):
    vacuum = ChargedCocycle.vacuum(lattice6.poset, lattice6.dim)
    eye = np.eye(lattice6.dim, dtype=complex)
    r = CocycleArrow(vacuum.cocycle, vacuum.cocycle, {a: r_scale * eye for a in lattice6.poset.regions})
    rbar = CocycleArrow(vacuum.cocycle, vacuum.cocycle, {a: rbar_scale * eye for a in lattice6.poset.regions})
    equations, arrows = verify_conjugate(majorana, majorana, r, rbar)
    assert equations.passed is passes
    assert arrows.passed
