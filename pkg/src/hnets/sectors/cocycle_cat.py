# src/hnets/sectors/cocycle_cat.py

import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from hnets.algebra.local_algebras import LocalAlgebra
from hnets.algebra.netbundle import NetBundle
from hnets.exceptions import CoverageError, IncompatibleFamilyError, PathError, PosetError
from hnets.models import CheckReport, Path, Pi1Presentation, Region, Simplex1
from hnets.topology.homotopy import HolonomyMorphism, generator_loop
from hnets.topology.poset_core import Poset
from hnets.topology.simplicial import build_path_frame, enumerate_simplices
from hnets.utils.calculations import (DEFAULT_TOLERANCE, dagger, distance, intertwiner_space, matrix_key,
                                      ordered_product)

logger = logging.getLogger(__name__)


class Cocycle:
    """
    Unitary 1-cochain z on Σ₁ of a poset, optionally with the local algebras
    R_a its values must lie in.

    Values are either given explicitly or produced on demand by ``fn`` and cached.
    """

    def __init__(self, poset: Poset, values: Optional[Dict[Simplex1, np.ndarray]] = None,
                 fn: Optional[Callable[[Simplex1], np.ndarray]] = None, dim: Optional[int] = None,
                 algebras: Optional[Dict[Region, LocalAlgebra]] = None, name: str = ""):
        if values is None and fn is None:
            raise ValueError("a cocycle needs explicit values or a value function")
        self.poset = poset
        self.algebras = algebras
        self.name = name or f"z/{poset.name}"
        self._values: Dict[Simplex1, np.ndarray] = {}
        self._fn = fn
        if values is not None:
            for b, m in values.items():
                self._values[b] = np.asarray(m, dtype=complex)
        if dim is None:
            if self._values:
                dim = next(iter(self._values.values())).shape[0]
            else:
                dim = self.value(enumerate_simplices(poset, 1)[0]).shape[0]
        self.dim = dim
        logger.debug(f"Cocycle {self.name!r} on {poset.name} (dim={dim})")

    @classmethod
    def from_function(cls, poset: Poset, fn: Callable[[Simplex1], np.ndarray], **kwargs) -> "Cocycle":
        return cls(poset, fn=fn, **kwargs)

    @classmethod
    def identity(cls, poset: Poset, dim: int, **kwargs) -> "Cocycle":
        eye = np.eye(dim, dtype=complex)
        return cls(poset, fn=lambda b: eye, dim=dim, name=kwargs.pop("name", f"ι/{poset.name}"), **kwargs)

    @classmethod
    def coboundary(cls, poset: Poset, family: Dict[Region, np.ndarray], **kwargs) -> "Cocycle":
        """z(b) = psi_{d0 b}* psi_{d1 b}."""
        return cls(poset, fn=lambda b: dagger(family[b.d0]) @ family[b.d1], **kwargs)

    def value(self, b: Simplex1) -> np.ndarray:
        m = self._values.get(b)
        if m is None:
            if self._fn is None:
                raise PathError(f"cocycle {self.name!r} has no value on {b}", witness=b)
            m = np.asarray(self._fn(b), dtype=complex)
            self._values[b] = m
        return m

    __call__ = value

    def materialize(self) -> Dict[Simplex1, np.ndarray]:
        return {b: self.value(b) for b in enumerate_simplices(self.poset, 1)}

    def with_values(self, overrides: Dict[Simplex1, np.ndarray]) -> "Cocycle":
        values = self.materialize()
        values.update(overrides)
        return Cocycle(self.poset, values, dim=self.dim, algebras=self.algebras, name=f"{self.name}'")

    def __repr__(self) -> str:
        return f"Cocycle({self.name!r}, dim={self.dim})"


def check_cocycle(z: Cocycle, tol: float = DEFAULT_TOLERANCE) -> List[CheckReport]:
    """dz = 1 on every 2-simplex, unitarity, and locality z(b) in R_|b| when algebras are known."""
    identity = np.eye(z.dim)
    cocycle = CheckReport("cocycle-identity", tolerance=tol)
    for c in enumerate_simplices(z.poset, 2):
        dz = z(c.d0) @ z(c.d2) @ dagger(z(c.d1))
        cocycle.record(c, distance(dz, identity))
    unitary = CheckReport("unitarity", tolerance=tol)
    locality = CheckReport("locality", tolerance=tol)
    for b in enumerate_simplices(z.poset, 1):
        m = z(b)
        unitary.record(b, distance(m @ dagger(m), identity))
        if z.algebras is not None:
            if z.algebras[b.support].contains(m, tol):
                locality.record(b, 0.0)
            else:
                locality.fail(b, f"value leaves R_{b.support}")
    if z.algebras is None:
        locality.notes.append("no local algebras attached; locality not checked")
    logger.info(f"Cocycle {z.name!r}: {cocycle.checked} triangles, passed={cocycle.passed and unitary.passed}")
    return [cocycle, unitary, locality]


def evaluate_path(z: Cocycle, path: Path) -> np.ndarray:
    """z(p) = z(b_n) ... z(b_1), reversed letters contributing z(b)*."""
    for r in path.regions():
        if r not in z.poset:
            raise PathError(f"path leaves {z.poset.name} at {r}", witness=r)
    factors = (z(b) if o > 0 else dagger(z(b)) for b, o in path.word)
    return ordered_product(factors, z.dim)


def sector_holonomy(z: Cocycle, pres: Pi1Presentation, tol: float = DEFAULT_TOLERANCE) -> HolonomyMorphism:
    """Generator g -> z(loop_g) in the fibre at the presentation's basepoint."""
    images = [evaluate_path(z, generator_loop(pres, k)) for k in range(pres.rank)]
    hom = HolonomyMorphism(pres, images, dim=z.dim)
    hom.check_relations(tol)
    return hom


def sector_bundle(z: Cocycle) -> NetBundle:
    """The Hilbert net bundle with U_{a'a} = z(a, a'; a')."""
    connect = {(lo, hi): z(Simplex1(lo, hi, hi)) for lo, hi in z.poset.strict_pairs()}
    return NetBundle(z.poset, connect, dim=z.dim, name=f"H^{z.name}")


# --- presheaf structure -------------------------------------------------------------

@dataclass
class LocalObject:
    """The restriction of a cocycle to Σ₁(Δᵃ)."""
    region: Region
    cocycle: Cocycle

    @property
    def poset(self) -> Poset:
        return self.cocycle.poset


def restrict_cocycle(z: Cocycle, a: Region) -> LocalObject:
    local = z.poset.local_poset(a)
    algebras = None if z.algebras is None else {e: z.algebras[e] for e in local.regions}
    restricted = Cocycle(local, fn=z.value, dim=z.dim, algebras=algebras, name=f"{z.name}|Δ{a}")
    return LocalObject(a, restricted)


def restrict_local(obj: LocalObject, a: Region) -> LocalObject:
    """Restriction of a local object over Δ^{a'} to Δᵃ for a <= a'."""
    if a not in obj.poset and a != obj.region:
        raise PosetError(f"{a} is not below {obj.region}", witness=a)
    lower = [e for e in obj.poset.regions if obj.poset.lt(e, a)] if a in obj.poset else list(obj.poset.regions)
    if not lower:
        raise PosetError(f"region {a} has no proper sub-regions", witness=a)
    local = obj.poset.subposet(lower, name=f"{obj.poset.name}/Δ{a}")
    z = obj.cocycle
    algebras = None if z.algebras is None else {e: z.algebras[e] for e in local.regions}
    return LocalObject(a, Cocycle(local, fn=z.value, dim=z.dim, algebras=algebras, name=f"{z.name}|Δ{a}"))


def glue_sections(family: Dict[Region, LocalObject], poset: Poset, target: Optional[Poset] = None,
                  tol: float = DEFAULT_TOLERANCE) -> Cocycle:
    """
    Cocycle on the union of the Δᵃ from a compatible family of local objects.

    Values on shared 1-simplices must agree; a target poset with a region
    outside every Δᵃ raises CoverageError.
    """
    members = sorted(family.items(), key=lambda kv: kv[0].id)
    owner: Dict[Region, Region] = {}
    for a, obj in members:
        for e in obj.poset.regions:
            owner.setdefault(e, a)
    if target is None:
        covered = [r for r in poset.regions if r in owner]
        if not covered:
            raise CoverageError("family covers no region")
        target = poset if len(covered) == len(poset) else poset.subposet(covered, name=f"{poset.name}|covered")
    uncovered = [r for r in target.regions if r not in owner]
    if uncovered:
        raise CoverageError(f"region {uncovered[0]} lies in no Δᵃ of the family", witness=uncovered[0])

    for i, (a, obj_a) in enumerate(members):
        for a2, obj_b in members[i + 1:]:
            shared = [e for e in obj_a.poset.regions if e in obj_b.poset]
            if not shared:
                continue
            for s in shared:
                for x in obj_a.poset.below(s):
                    for y in obj_a.poset.below(s):
                        b = Simplex1(x, y, s)
                        if distance(obj_a.cocycle(b), obj_b.cocycle(b)) >= tol:
                            raise IncompatibleFamilyError(
                                f"local objects over Δ{a} and Δ{a2} disagree on {b}", witness=(a, a2, b))

    def glued(b: Simplex1) -> np.ndarray:
        return family[owner[b.support]].cocycle(b)

    dim = members[0][1].cocycle.dim
    algebras = None
    if all(obj.cocycle.algebras is not None for _, obj in members):
        algebras = {r: family[owner[r]].cocycle.algebras[r] for r in target.regions}
    logger.info(f"Glued {len(members)} local objects into a cocycle on {target.name}")
    return Cocycle(target, fn=glued, dim=dim, algebras=algebras, name=f"glued/{target.name}")


# --- arrows ---------------------------------------------------------------------

@dataclass
class CocycleArrow:
    """t in (z, z'): t_{d0 b} z(b) = z'(b) t_{d1 b} on every 1-simplex."""
    source: Cocycle
    target: Cocycle
    components: Dict[Region, np.ndarray] = field(default_factory=dict)

    def __getitem__(self, a: Region) -> np.ndarray:
        return self.components[a]

    @classmethod
    def identity(cls, z: Cocycle) -> "CocycleArrow":
        eye = np.eye(z.dim, dtype=complex)
        return cls(z, z, {a: eye for a in z.poset.regions})


def check_arrow(t: CocycleArrow, tol: float = DEFAULT_TOLERANCE) -> List[CheckReport]:
    intertwining = CheckReport("arrow-intertwining", tolerance=tol)
    z, z2 = t.source, t.target
    for b in enumerate_simplices(z.poset, 1):
        intertwining.record(b, distance(t[b.d0] @ z(b), z2(b) @ t[b.d1]))
    locality = CheckReport("arrow-locality", tolerance=tol)
    algebras = z.algebras or z2.algebras
    if algebras is not None:
        for a, m in sorted(t.components.items(), key=lambda kv: kv[0].id):
            if algebras[a].contains(m, tol):
                locality.record(a, 0.0)
            else:
                locality.fail(a, f"component leaves R_{a}")
    return [intertwining, locality]


def compose_arrows(s: CocycleArrow, t: CocycleArrow) -> CocycleArrow:
    """s . t for t in (z, z'), s in (z', z'')."""
    if t.target is not s.source:
        raise ValueError("arrows do not compose: target of t is not the source of s")
    return CocycleArrow(t.source, s.target, {a: s[a] @ t[a] for a in t.components})


def _phase_normalized(a: np.ndarray, b: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    flat = a.reshape(-1)
    k = int(np.argmax(np.abs(flat)))
    phase = flat[k] / abs(flat[k]) if abs(flat[k]) > 0 else 1.0
    return a / phase, b / phase


def arrow_space(z: Cocycle, z2: Cocycle, tol: float = DEFAULT_TOLERANCE, max_dim: int = 32,
                pole: Optional[Region] = None) -> List[CocycleArrow]:
    """
    Basis of (z, z').

    An arrow is fixed by its pole component t_w through t_a = z'(p_a) t_w z(p_a)*
    along frame paths. t_w must intertwine the holonomies along every loop
    through a 1-simplex, and lie in the transported commutant constraints of
    every R_a. Algebras without ``commutant_constraints`` are checked afterwards.
    """
    poset = z.poset
    frame = build_path_frame(poset, pole or poset.regions[0])
    transports = {a: (evaluate_path(z, frame.path_to(a)), evaluate_path(z2, frame.path_to(a)))
                  for a in poset.regions}

    pairs: Dict[bytes, Tuple[np.ndarray, np.ndarray]] = {}

    def add(a_src: np.ndarray, b_tgt: np.ndarray):
        a_src, b_tgt = _phase_normalized(a_src, b_tgt)
        pairs.setdefault(matrix_key(a_src) + matrix_key(b_tgt), (a_src, b_tgt))

    for b in enumerate_simplices(poset, 1):
        if b.is_degenerate:
            continue
        u1, u2 = transports[b.d1]
        v1, v2 = transports[b.d0]
        # loop f_{d1} * b * f_{d0}^-1 at the pole
        add(dagger(v1) @ z(b) @ u1, dagger(v2) @ z2(b) @ u2)
    algebras = z.algebras or z2.algebras
    deferred = False
    if algebras is not None:
        for a in poset.regions:
            try:
                constraints = algebras[a].commutant_constraints()
            except AttributeError:
                deferred = True
                continue
            u1, u2 = transports[a]
            for c in constraints:
                add(dagger(u1) @ c @ u1, dagger(u2) @ c @ u2)
    sources = [p[0] for p in pairs.values()] or [np.eye(z.dim, dtype=complex)]
    targets = [p[1] for p in pairs.values()] or [np.eye(z2.dim, dtype=complex)]
    basis = intertwiner_space(sources, targets, tol=tol * 10, max_dim=max_dim)

    arrows = []
    for x in basis:
        comps = {a: transports[a][1] @ x @ dagger(transports[a][0]) for a in poset.regions}
        arrow = CocycleArrow(z, z2, comps)
        if deferred and not all(r.passed for r in check_arrow(arrow, tol=1e-6)):
            continue
        arrows.append(arrow)
    logger.info(f"Arrow space ({z.name}, {z2.name}): dimension {len(arrows)} from {len(pairs)} constraints")
    if len(arrows) == 1 and z is z2:
        logger.info("Arrow space collapses to scalars")
    return arrows
