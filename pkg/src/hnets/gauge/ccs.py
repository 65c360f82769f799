# src/hnets/gauge/ccs.py

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Union

import numpy as np
from scipy import linalg

from hnets.gauge.twistkit import winding_hom
from hnets.models import CheckReport, GenWord, Path
from hnets.topology.homotopy import HolonomyMorphism, path_word
from hnets.utils.calculations import DEFAULT_TOLERANCE, unit_phase_fraction

logger = logging.getLogger(__name__)

RZ = Union[Fraction, float]


def _mod1(x: RZ) -> RZ:
    return x % 1 if isinstance(x, Fraction) else float(x) % 1.0


def rz_distance(x: RZ, y: RZ) -> float:
    """Distance on R/Z."""
    d = float(x - y) % 1.0
    return min(d, 1.0 - d)


@dataclass
class CCSClass:
    """
    First characteristic class of a flat unitary holonomy: the homomorphism
    pi_1 -> R/Z, loop -> (1/2pi) arg det chi(loop), stored on the generators.
    """
    chi: HolonomyMorphism
    values: List[RZ]

    def evaluate_word(self, word: GenWord) -> RZ:
        total: RZ = Fraction(0)
        for g, e in word:
            total = total + e * self.values[g]
        return _mod1(total)

    def evaluate(self, path: Path) -> RZ:
        return self.evaluate_word(path_word(self.chi.presentation, path))

    def is_zero(self, tol: float = DEFAULT_TOLERANCE) -> bool:
        return all(rz_distance(v, 0) < tol for v in self.values)

    def as_dict(self) -> Dict[str, RZ]:
        return {str(g): v for g, v in zip(self.chi.presentation.generators, self.values)}


def _rz_of_phase(phase: complex, max_denominator: int, tol: float) -> RZ:
    return unit_phase_fraction(phase, max_denominator=max_denominator, tol=tol)


def c1_class(chi: HolonomyMorphism, max_denominator: int = 10 ** 6,
             tol: float = DEFAULT_TOLERANCE) -> CCSClass:
    """(1/2pi) arg det of every generator image, rational where the phase is a root of unity."""
    if chi.images is None:
        raise ValueError("c1 needs a holonomy with unitary images")
    values = [_rz_of_phase(complex(linalg.det(m)), max_denominator, tol) for m in chi.images]
    cls = CCSClass(chi, values)
    logger.debug(f"c1 class on {chi.presentation.rank} generators: {cls.as_dict()}")
    return cls


def check_ccs_homomorphism(cls: CCSClass, tol: float = DEFAULT_TOLERANCE) -> CheckReport:
    """
    The class is additive: on every relator it vanishes, and on pairs of
    generators c1(gh) agrees with the determinant of the product image.
    """
    report = CheckReport("ccs-additivity", tolerance=tol)
    pres = cls.chi.presentation
    for word, witness in zip(pres.relations, pres.witnesses):
        report.record(witness, rz_distance(cls.evaluate_word(word), 0))
    n = pres.rank
    for a in range(n):
        for b in range(n):
            word = ((a, 1), (b, 1))
            direct = unit_phase_fraction(complex(linalg.det(cls.chi.evaluate_word(word))), tol=tol)
            report.record(f"g{a}*g{b}", rz_distance(cls.evaluate_word(word), direct))
    return report


def block_sum(chi1: HolonomyMorphism, chi2: HolonomyMorphism) -> HolonomyMorphism:
    """The direct-sum morphism g -> chi1(g) + chi2(g) on a shared presentation."""
    if chi1.presentation is not chi2.presentation and chi1.presentation.generators != chi2.presentation.generators:
        raise ValueError("block sums need the same presentation")
    images = [linalg.block_diag(a, b) for a, b in zip(chi1.images, chi2.images)]
    return HolonomyMorphism(chi1.presentation, images, dim=chi1.dim + chi2.dim)


@dataclass
class DegreeOneClass:
    dim: int
    c1: CCSClass
    torsion: bool


def ccs_degree_one(chi: HolonomyMorphism, max_denominator: int = 10 ** 6,
                   tol: float = DEFAULT_TOLERANCE) -> DegreeOneClass:
    """
    Degree-one part of the combined class: the fibre dimension and c1.
    ``torsion`` is True when every value is rational, i.e. c1 vanishes mod Q.
    """
    cls = c1_class(chi, max_denominator, tol)
    torsion = all(isinstance(v, Fraction) for v in cls.values)
    return DegreeOneClass(chi.dim, cls, torsion)


def classes_agree(c1: CCSClass, c2: CCSClass, tol: float = DEFAULT_TOLERANCE) -> bool:
    if len(c1.values) != len(c2.values):
        return False
    return all(rz_distance(a, b) < tol for a, b in zip(c1.values, c2.values))


def theta_character(poset, theta: RZ, dim: int = 1) -> HolonomyMorphism:
    """chi(winding w) = exp(2 pi i theta w) 1_d on a circle base."""
    return winding_hom(poset, np.exp(2j * np.pi * float(theta)) * np.eye(dim, dtype=complex), dim)
