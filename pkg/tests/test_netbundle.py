# tests/test_netbundle.py
import numpy as np
import pytest

from hnets.algebra.groupkit import PAULI_X, PAULI_Y, PAULI_Z
from hnets.algebra.local_algebras import FullMatrixAlgebra
from hnets.algebra.netbundle import (AlgebraNet, NetBundle, Representation, auto_trivialization,
                                     bundle_isomorphism, check_isomorphism, check_net_commutator, from_holonomy,
                                     holonomy_of, net_commutator, paths_within, verify_trivialization)
from hnets.exceptions import PosetError, TrivializationError
from hnets.models import Path, Simplex1
from hnets.topology.homotopy import homotopy_engine, standard_loop
from hnets.topology.simplicial import build_path_frame
from hnets.utils.calculations import distance

I2 = np.eye(2, dtype=complex)


@pytest.fixture
def regions(mincircle):
    w, e, n, s = (mincircle.region(k) for k in range(4))
    return w, e, n, s


@pytest.fixture
def xz_bundle(mincircle, regions):
    w, e, n, s = regions
    return NetBundle.from_covers(mincircle, {(w, n): I2, (e, n): I2, (w, s): PAULI_X, (e, s): PAULI_Z})


def test_from_covers_satisfies_net_relation(xz_bundle, regions):
    w, _, _, s = regions
    assert xz_bundle.verify().passed
    assert distance(xz_bundle.map(w, w), I2) < 1e-12
    assert distance(xz_bundle.map(w, s), PAULI_X) < 1e-12
    with pytest.raises(PosetError):
        xz_bundle.map(s, w)


def test_constructor_rejects_bad_maps(mincircle, regions):
    w, _, n, _ = regions
    with pytest.raises(PosetError):
        NetBundle(mincircle, {}, dim=2)
    with pytest.raises(PosetError):
        NetBundle(mincircle, {(n, w): I2})
    with pytest.raises(ValueError):
        NetBundle(mincircle, {}, kind="bogus", dim=2)
    with pytest.raises(ValueError):
        NetBundle(mincircle, {}, kind="group")


def test_loop_transport_is_nontrivial(xz_bundle, mincircle):
    h = xz_bundle.transport(standard_loop(mincircle))
    assert distance(h @ h, -I2) < 1e-12


def test_holonomy_of_trivial_and_twisted_bundles(xz_bundle, mincircle, regions):
    frame = build_path_frame(mincircle, regions[0])
    pres = homotopy_engine(mincircle).presentation
    assert holonomy_of(NetBundle.trivial(mincircle, 2), frame, pres).is_trivial()
    assert not holonomy_of(xz_bundle, frame, pres).is_trivial()


def test_bundle_from_holonomy_is_isomorphic(xz_bundle, mincircle, regions):
    frame = build_path_frame(mincircle, regions[0])
    chi = holonomy_of(xz_bundle, frame, homotopy_engine(mincircle).presentation)
    rebuilt = from_holonomy(chi, frame, poset=mincircle)
    assert rebuilt.verify().passed
    nu = bundle_isomorphism(xz_bundle, rebuilt, frame)
    assert nu is not None
    assert check_isomorphism(xz_bundle, rebuilt, nu).passed


def test_gauge_transform_is_isomorphic(xz_bundle, regions):
    w, e, n, s = regions
    moved = xz_bundle.gauge_transform({w: PAULI_X, e: PAULI_Z, n: PAULI_Y, s: I2})
    assert moved.verify().passed
    nu = bundle_isomorphism(xz_bundle, moved)
    assert nu is not None
    assert check_isomorphism(xz_bundle, moved, nu).passed


def test_trivial_bundle_is_not_isomorphic_to_twisted(xz_bundle, mincircle):
    assert bundle_isomorphism(NetBundle.trivial(mincircle, 2), xz_bundle) is None
    assert bundle_isomorphism(NetBundle.trivial(mincircle, 3), xz_bundle) is None


def test_auto_trivialization(xz_bundle, mincircle, regions):
    w, e, _, s = regions
    family = auto_trivialization(xz_bundle, [w, s, e])
    assert verify_trivialization(xz_bundle, family).passed
    with pytest.raises(TrivializationError):
        auto_trivialization(xz_bundle, list(mincircle.regions))


def test_net_commutator_uses_path_transport(xz_bundle, regions):
    w, e, n, s = regions
    path = Path.of(Simplex1(w, e, s))
    # transport along the path is Z X, so Z is carried to -Z
    minus, plus = net_commutator(PAULI_X, PAULI_Z, xz_bundle, path)
    assert distance(minus, 2j * PAULI_Y) < 1e-12
    assert distance(plus, 0 * I2) < 1e-12
    family = auto_trivialization(xz_bundle, [w, n, e])
    with pytest.raises(TrivializationError):
        net_commutator(PAULI_X, PAULI_Z, xz_bundle, path, trivialization=family)


def test_net_commutator_is_path_independent_inside_omega(xz_bundle, mincircle, regions):
    w, e, n, s = regions
    omega = [w, s, e]
    paths = list(paths_within(mincircle, omega, w, e, 2))
    assert Path.of(Simplex1(w, e, s)) in paths
    assert all(p.source == w and p.target == e for p in paths)
    result = check_net_commutator(PAULI_X, PAULI_Z, xz_bundle, e, w, omega)
    assert result.report.passed
    assert result.paths > len(paths)
    assert result.max_len == 6
    assert "bounded check" in result.report.notes[0]
    assert distance(result.minus, 2j * PAULI_Y) < 1e-12
    assert result.vanishes(anti=True)
    assert not result.vanishes()


def test_net_commutator_at_one_region_is_the_ordinary_commutator(xz_bundle, regions):
    w, _, _, s = regions
    result = check_net_commutator(PAULI_X, PAULI_X, xz_bundle, w, w, [w, s], max_len=2)
    assert result.vanishes()
    assert distance(result.plus, 2 * I2) < 1e-12
    with pytest.raises(TrivializationError):
        check_net_commutator(PAULI_X, PAULI_X, xz_bundle, w, regions[1], [w, s])


def test_algebra_net_and_representation(xz_bundle, mincircle):
    algebras = {a: FullMatrixAlgebra(2) for a in mincircle.regions}
    net = AlgebraNet(mincircle, algebras, dict(xz_bundle.connect))
    assert net.verify().passed
    assert Representation(net, xz_bundle).verify().passed
    plain = AlgebraNet(mincircle, algebras)
    report = Representation(plain, xz_bundle).verify()
    assert not report.passed
    assert report.law == "representation-covariance"
