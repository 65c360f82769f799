# src/hnets/sectors/lattice.py

import logging
from functools import cached_property
from typing import Dict, FrozenSet, List

import numpy as np
from scipy import sparse

from hnets.algebra.groupkit import FiniteGroup, GradedGroup
from hnets.algebra.local_algebras import GradedCommutantAlgebra
from hnets.exceptions import PosetError
from hnets.models import CheckReport, Region
from hnets.topology.poset_core import Poset, build_circle_base
from hnets.utils.calculations import DEFAULT_TOLERANCE, bracket, conjugate_by, dagger, distance

logger = logging.getLogger(__name__)

MIN_SITES = 5
MAX_SITES = 12

_SIGMA_MINUS = sparse.csr_matrix(np.array([[0, 1], [0, 0]], dtype=complex))
_SIGMA_Z = sparse.csr_matrix(np.diag([1.0, -1.0]).astype(complex))
_EYE2 = sparse.identity(2, dtype=complex, format="csr")


class LatticeFieldNet:
    """
    Fermions on m circle sites in the Jordan-Wigner representation on C^(2^m).

    The base is the circle poset of arcs; F_a is generated by the modes of the
    sites in a, the gauge group is generated by V = exp(i pi N / n) (order 2n,
    V^n is the parity) and R_a is the V-invariant part of F_a.
    """

    def __init__(self, sites: int, gauge_n: int = 1, max_len: int = 3):
        if sites < MIN_SITES:
            raise PosetError(f"the lattice model needs at least {MIN_SITES} sites, got {sites}")
        if sites > MAX_SITES:
            raise PosetError(f"the lattice model is limited to {MAX_SITES} sites, got {sites}")
        if gauge_n < 1:
            raise ValueError(f"gauge order parameter must be positive, got {gauge_n}")
        self.sites = sites
        self.gauge_n = gauge_n
        self.dim = 2 ** sites
        self.poset: Poset = build_circle_base(sites, max_len)
        self._annihilators = [self._jordan_wigner(j) for j in range(sites)]
        logger.info(f"LatticeFieldNet: {sites} sites, dim {self.dim}, gauge Z{2 * gauge_n}")

    def _jordan_wigner(self, j: int) -> np.ndarray:
        factors = [_SIGMA_Z] * j + [_SIGMA_MINUS] + [_EYE2] * (self.sites - j - 1)
        op = factors[0]
        for f in factors[1:]:
            op = sparse.kron(op, f, format="csr")
        return op.toarray()

    # --- operators -------------------------------------------------------------

    def annihilation(self, j: int) -> np.ndarray:
        return self._annihilators[j % self.sites]

    def creation(self, j: int) -> np.ndarray:
        return dagger(self.annihilation(j))

    def majorana(self, j: int, kind: str = "c") -> np.ndarray:
        """c_j = a_j + a_j*, d_j = i (a_j - a_j*); both self-adjoint unitaries."""
        a = self.annihilation(j)
        if kind == "c":
            return a + dagger(a)
        return 1j * (a - dagger(a))

    @cached_property
    def number(self) -> np.ndarray:
        return sum(self.creation(j) @ self.annihilation(j) for j in range(self.sites))

    @cached_property
    def occupation(self) -> np.ndarray:
        return np.real(np.diag(self.number)).round().astype(int)

    @cached_property
    def parity(self) -> np.ndarray:
        return np.diag((-1.0) ** self.occupation).astype(complex)

    def gauge_unitary(self, k: int = 1) -> np.ndarray:
        """V^k with V = exp(i pi N / n)."""
        return np.diag(np.exp(1j * np.pi * k * self.occupation / self.gauge_n))

    def phase_unitary(self, z: complex) -> np.ndarray:
        """V_z = z^N for a phase z."""
        return np.diag(np.power(complex(z), self.occupation))

    @cached_property
    def gauge_group(self) -> GradedGroup:
        group = FiniteGroup.generated_by(f"gauge-Z{2 * self.gauge_n}", [self.gauge_unitary(1)])
        return GradedGroup(group, group.index_of(self.parity))

    # --- localization ------------------------------------------------------------

    def sites_of(self, region: Region) -> FrozenSet[int]:
        kind, start, length = region.payload
        if kind != "arc":
            raise PosetError(f"region {region} is not a circle arc", witness=region)
        return frozenset((start + k) % self.sites for k in range(length))

    def first_site(self, region: Region) -> int:
        return region.payload[1] % self.sites

    def last_site(self, region: Region) -> int:
        _, start, length = region.payload
        return (start + length - 1) % self.sites

    def outside_majoranas(self, region: Region) -> List[np.ndarray]:
        inside = self.sites_of(region)
        return [self.majorana(j, kind) for j in range(self.sites) if j not in inside for kind in ("c", "d")]

    def field_generators(self, region: Region) -> List[np.ndarray]:
        return [op for j in sorted(self.sites_of(region)) for op in (self.annihilation(j), self.creation(j))]

    def observable_generators(self, region: Region) -> List[np.ndarray]:
        sites = sorted(self.sites_of(region))
        gens = [self.creation(i) @ self.annihilation(j) for i in sites for j in sites]
        if self.gauge_n == 1:
            gens += [self.annihilation(i) @ self.annihilation(j) for i in sites for j in sites if i < j]
            gens += [self.creation(i) @ self.creation(j) for i in sites for j in sites if i < j]
        return gens

    def field_algebra(self, region: Region) -> GradedCommutantAlgebra:
        return self._field_algebras[region]

    def observable_algebra(self, region: Region) -> GradedCommutantAlgebra:
        return self._observable_algebras[region]

    @cached_property
    def _field_algebras(self) -> Dict[Region, GradedCommutantAlgebra]:
        return {
            a: GradedCommutantAlgebra(self.parity, self.outside_majoranas(a), gens=self.field_generators(a),
                                      name=f"F_{a}")
            for a in self.poset.regions
        }

    @cached_property
    def _observable_algebras(self) -> Dict[Region, GradedCommutantAlgebra]:
        v = self.gauge_unitary(1)
        return {
            a: GradedCommutantAlgebra(self.parity, self.outside_majoranas(a), commute_with=[v],
                                      gens=self.observable_generators(a), name=f"R_{a}", even_only=True)
            for a in self.poset.regions
        }

    @property
    def observable_algebras(self) -> Dict[Region, GradedCommutantAlgebra]:
        return dict(self._observable_algebras)

    @property
    def field_algebras(self) -> Dict[Region, GradedCommutantAlgebra]:
        return dict(self._field_algebras)

    # --- checks -------------------------------------------------------------------

    def verify_car(self, tol: float = 1e-12) -> CheckReport:
        """{a_i, a_j*} = delta_ij and {a_i, a_j} = 0."""
        report = CheckReport("car", tolerance=tol)
        eye = np.eye(self.dim)
        for i in range(self.sites):
            for j in range(self.sites):
                ai, aj = self.annihilation(i), self.annihilation(j)
                expected = eye if i == j else 0 * eye
                report.record(f"{{a{i},a{j}*}}", distance(bracket(ai, dagger(aj), anti=True), expected))
                report.record(f"{{a{i},a{j}}}", distance(bracket(ai, aj, anti=True), 0 * eye))
        return report

    def bmt_phase_check(self, tol: float = DEFAULT_TOLERANCE) -> CheckReport:
        """V a_j* V* = exp(i pi / n) a_j* for every site."""
        report = CheckReport("gauge-phase", tolerance=tol)
        v = self.gauge_unitary(1)
        phase = np.exp(1j * np.pi / self.gauge_n)
        for j in range(self.sites):
            report.record(f"site{j}", distance(conjugate_by(v, self.creation(j)), phase * self.creation(j)))
        return report

    def __repr__(self) -> str:
        return f"LatticeFieldNet(sites={self.sites}, gauge_n={self.gauge_n})"
