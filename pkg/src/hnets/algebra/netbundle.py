# src/hnets/algebra/netbundle.py

import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterator, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from hnets.algebra.groupkit import FiniteGroup
from hnets.algebra.local_algebras import LocalAlgebra
from hnets.exceptions import PosetError, TrivializationError
from hnets.models import CheckReport, Letter, Path, PathFrame, Pi1Presentation, Region, Simplex1
from hnets.topology.homotopy import HolonomyMorphism, generator_loop, homotopy_engine
from hnets.topology.poset_core import Poset
from hnets.topology.simplicial import build_path_frame, enumerate_simplices
from hnets.utils.calculations import (DEFAULT_TOLERANCE, MatrixValidator, bracket, conjugate_by, dagger, distance,
                                      intertwiner_space, ordered_product, polar_unitary)

logger = logging.getLogger(__name__)

FIBRE_KINDS = ("hilbert", "algebra", "group")

Pair = Tuple[Region, Region]


class NetBundle:
    """
    Net bundle over a poset with invertible connecting maps.

    ``connect[(a, a')]`` for a <= a' is the unitary U_{a'a}: fibre(a) -> fibre(a').
    Group fibres carry automorphisms as permutation matrices on the group's
    elements; algebra fibres carry the implementing unitary of j_{a'a} = Ad U_{a'a}.
    """

    def __init__(self, poset: Poset, connect: Dict[Pair, np.ndarray], kind: str = "hilbert",
                 dim: Optional[int] = None, group: Optional[FiniteGroup] = None, name: str = ""):
        if kind not in FIBRE_KINDS:
            raise ValueError(f"unknown fibre kind {kind!r}")
        if kind == "group" and group is None:
            raise ValueError("group fibres need the group")
        self.poset = poset
        self.kind = kind
        self.group = group
        self.name = name or f"{kind}-bundle/{poset.name}"
        if dim is None:
            dim = group.order if kind == "group" else next(iter(connect.values())).shape[0]
        self.dim = dim
        self.connect: Dict[Pair, np.ndarray] = {}
        for (a, b), m in connect.items():
            if not poset.leq(a, b):
                raise PosetError(f"connecting map given for {a} -> {b} but {a} is not below {b}", witness=(a, b))
            if not MatrixValidator.validate_square(m, dim):
                raise ValueError(f"connecting map {a} -> {b} is not a {dim}x{dim} matrix")
            self.connect[(a, b)] = np.asarray(m, dtype=complex)
        for a in poset.regions:
            self.connect.setdefault((a, a), np.eye(dim, dtype=complex))
        missing = [(lo, hi) for lo, hi in poset.strict_pairs() if (lo, hi) not in self.connect]
        if missing:
            raise PosetError(f"no connecting map for {missing[0][0]} -> {missing[0][1]}", witness=missing[0])
        logger.debug(f"NetBundle {self.name!r}: {kind} fibres of dimension {dim}")

    @classmethod
    def from_covers(cls, poset: Poset, covers: Dict[Pair, np.ndarray], **kwargs) -> "NetBundle":
        """Extend maps given on covering pairs by composing along a chain of covers."""
        graph = nx.DiGraph()
        graph.add_nodes_from(r.id for r in poset.regions)
        for (a, b) in covers:
            graph.add_edge(a.id, b.id)
        dim = next(iter(covers.values())).shape[0]
        connect = {}
        for lo, hi in poset.strict_pairs():
            try:
                chain = nx.shortest_path(graph, lo.id, hi.id)
            except nx.NetworkXNoPath:
                raise PosetError(f"no chain of covers from {lo} to {hi}", witness=(lo, hi)) from None
            m = np.eye(dim, dtype=complex)
            for x, y in zip(chain, chain[1:]):
                m = covers[(poset.region(x), poset.region(y))] @ m
            connect[(lo, hi)] = m
        return cls(poset, connect, dim=dim, **kwargs)

    @classmethod
    def trivial(cls, poset: Poset, dim: int, **kwargs) -> "NetBundle":
        eye = np.eye(dim, dtype=complex)
        return cls(poset, {(lo, hi): eye for lo, hi in poset.strict_pairs()}, dim=dim, **kwargs)

    def map(self, a: Region, b: Region) -> np.ndarray:
        try:
            return self.connect[(a, b)]
        except KeyError:
            raise PosetError(f"{a} is not below {b}", witness=(a, b)) from None

    def transport_letter(self, letter: Letter) -> np.ndarray:
        """U_b = U_{|b| d0b}* U_{|b| d1b}, or its adjoint for a reversed letter."""
        b, o = letter
        u = dagger(self.map(b.d0, b.support)) @ self.map(b.d1, b.support)
        return u if o > 0 else dagger(u)

    def transport(self, path: Path) -> np.ndarray:
        return ordered_product((self.transport_letter(x) for x in path.word), self.dim)

    def verify(self, tol: float = DEFAULT_TOLERANCE) -> CheckReport:
        """Unitarity of every map and the net relation on every chain."""
        report = CheckReport("net-composition", tolerance=tol)
        for (a, b), m in sorted(self.connect.items(), key=lambda kv: (kv[0][0].id, kv[0][1].id)):
            report.record(f"{a}->{b}", distance(m @ dagger(m), np.eye(self.dim)), "unitarity")
        for lo, mid, hi in self.poset.chains3():
            lhs = self.map(mid, hi) @ self.map(lo, mid)
            report.record(f"{lo}<{mid}<{hi}", distance(lhs, self.map(lo, hi)))
        logger.info(f"Bundle {self.name!r}: net relation checked on {report.checked} instances, passed={report.passed}")
        return report

    def gauge_transform(self, family: Dict[Region, np.ndarray]) -> "NetBundle":
        """The bundle with maps W_{a'} U_{a'a} W_a*."""
        connect = {(a, b): family[b] @ m @ dagger(family[a]) for (a, b), m in self.connect.items()}
        return NetBundle(self.poset, connect, kind=self.kind, dim=self.dim, group=self.group,
                         name=f"{self.name}^W")


def holonomy_of(nb: NetBundle, frame: PathFrame, pres: Pi1Presentation,
                tol: float = DEFAULT_TOLERANCE) -> HolonomyMorphism:
    """
    Holonomy in the pole fibre: each generator loop at the basepoint is
    carried to the pole along the frame path.
    """
    to_base = frame.path_to(pres.basepoint)
    images = []
    for k in range(pres.rank):
        loop = to_base.then(generator_loop(pres, k)).then(to_base.reverse())
        images.append(nb.transport(loop))
    hom = HolonomyMorphism(pres, images, dim=nb.dim)
    hom.check_relations(tol)
    logger.info(f"Holonomy of {nb.name!r}: {pres.rank} generator images, trivial={hom.is_trivial(tol)}")
    return hom


def from_holonomy(chi: HolonomyMorphism, frame: PathFrame, poset: Optional[Poset] = None,
                  kind: str = "hilbert", group: Optional[FiniteGroup] = None) -> NetBundle:
    """
    U_{a'a} := chi(f_a * (a, a'; a') * f_a'^-1), read as a loop at the pole and
    moved to the presentation's basepoint along the frame.
    """
    pres = chi.presentation
    poset = poset or pres.poset
    to_base = frame.path_to(pres.basepoint)

    def at_pole(loop: Path) -> np.ndarray:
        return chi.evaluate(to_base.reverse().then(loop).then(to_base))

    connect = {}
    for lo, hi in poset.strict_pairs():
        step = Path.of(Simplex1(lo, hi, hi))
        loop = frame.path_to(lo).then(step).then(frame.path_from(hi))
        connect[(lo, hi)] = at_pole(loop)
    return NetBundle(poset, connect, kind=kind, dim=chi.dim, group=group, name=f"from-holonomy/{poset.name}")


def bundle_isomorphism(b1: NetBundle, b2: NetBundle, frame: Optional[PathFrame] = None,
                       tol: float = DEFAULT_TOLERANCE, max_dim: int = 32,
                       seed: int = 0) -> Optional[Dict[Region, np.ndarray]]:
    """
    Unitaries nu_a with nu_a' U1_{a'a} = U2_{a'a} nu_a for all a <= a', or None.

    Holonomies at a common pole are intertwined first; the intertwiner is
    spread over the poset along the frame.
    """
    if b1.poset is not b2.poset or b1.dim != b2.dim:
        return None
    poset = b1.poset
    frame = frame or build_path_frame(poset, poset.regions[0])
    engine = homotopy_engine(poset)
    pres = engine.presentation
    h1 = holonomy_of(b1, frame, pres, tol)
    h2 = holonomy_of(b2, frame, pres, tol)
    if pres.rank == 0:
        x = np.eye(b1.dim, dtype=complex)
    else:
        basis = intertwiner_space(h1.images, h2.images, tol=tol, max_dim=max_dim)
        if not basis:
            logger.info("Bundles have non-conjugate holonomy")
            return None
        rng = np.random.default_rng(seed)
        coeffs = rng.normal(size=len(basis)) + 1j * rng.normal(size=len(basis))
        x = polar_unitary(sum(c * m for c, m in zip(coeffs, basis)))
        if any(distance(x @ a, b @ x) >= 1e3 * tol for a, b in zip(h1.images, h2.images)):
            return None
    nu = {}
    for a in poset.regions:
        path = frame.path_to(a)
        nu[a] = b2.transport(path) @ x @ dagger(b1.transport(path))
    return nu


def check_isomorphism(b1: NetBundle, b2: NetBundle, nu: Dict[Region, np.ndarray],
                      tol: float = DEFAULT_TOLERANCE) -> CheckReport:
    report = CheckReport("bundle-intertwining", tolerance=tol)
    for (a, b), m in b1.connect.items():
        report.record(f"{a}->{b}", distance(nu[b] @ m, b2.map(a, b) @ nu[a]))
    return report


# --- trivializations and the net commutator -------------------------------------

def auto_trivialization(nb: NetBundle, omega: Sequence[Region]) -> Dict[Region, np.ndarray]:
    """
    V_e with U_{e'e} = V_e'* V_e on a simply connected region set, built from
    transports along a BFS frame inside it.
    """
    sub = nb.poset.subposet(omega, name=f"{nb.poset.name}|Ω")
    if not sub.is_connected() and len(sub) > 1:
        raise TrivializationError(f"region set {[str(r) for r in omega]} is not connected")
    if len(sub) > 1 and not homotopy_engine(sub).reduced.is_trivial:
        raise TrivializationError("region set is not simply connected; pass an explicit trivialization")
    frame = build_path_frame(sub, sub.regions[0])
    return {a: dagger(nb.transport(frame.path_to(a))) for a in sub.regions}


def verify_trivialization(nb: NetBundle, family: Dict[Region, np.ndarray],
                          tol: float = DEFAULT_TOLERANCE) -> CheckReport:
    """
    U_{e'e} = V_e'* V_e on every comparable pair of the family's regions.

    This makes the transport along every path inside the region set equal to
    V_target* V_source, whatever its length.
    """
    report = CheckReport("trivialization", tolerance=tol)
    regions = sorted(family)
    for a in regions:
        for b in regions:
            if a != b and nb.poset.leq(a, b):
                report.record(f"{a}->{b}", distance(nb.map(a, b), dagger(family[b]) @ family[a]))
    report.notes.append("identity checked pairwise; transport along any path inside the set follows")
    return report


def net_commutator(t: np.ndarray, t_prime: np.ndarray, nb: NetBundle, path: Path,
                   trivialization: Optional[Dict[Region, np.ndarray]] = None,
                   tol: float = DEFAULT_TOLERANCE) -> Tuple[np.ndarray, np.ndarray]:
    """
    [T, T']^p_- and [T, T']^p_+ for T at p.target, T' at p.source, with
    U_p = V_a* V_o taken from a trivialization of the regions p passes through.
    """
    if trivialization is None:
        trivialization = auto_trivialization(nb, path.regions())
    missing = [r for r in path.regions() if r not in trivialization]
    if missing:
        raise TrivializationError(f"path visits {missing[0]} outside the trivialized set", witness=missing[0])
    report = verify_trivialization(nb, trivialization, tol)
    if not report.passed:
        raise TrivializationError(f"trivialization fails on {report.first_witness}", witness=report.first_witness)
    u_p = dagger(trivialization[path.target]) @ trivialization[path.source]
    if distance(u_p, nb.transport(path)) >= tol:
        raise TrivializationError("transport along the path differs from V_a* V_o", witness=str(path))
    moved = conjugate_by(u_p, t_prime)
    return bracket(t, moved), bracket(t, moved, anti=True)


def paths_within(poset: Poset, omega: Sequence[Region], source: Region, target: Region,
                 max_len: int) -> Iterator[Path]:
    """Paths source -> target of at most ``max_len`` moving letters whose simplices lie in omega."""
    inside = set(omega)
    outgoing: Dict[Region, List[Simplex1]] = {r: [] for r in inside}
    for b in enumerate_simplices(poset, 1):
        if b.d1 != b.d0 and {b.d1, b.d0, b.support} <= inside:
            outgoing[b.d1].append(b)

    def extend(current: Region, letters: List[Letter]):
        if current == target:
            yield Path.from_letters(letters, source=source)
        if len(letters) == max_len:
            return
        for b in outgoing[current]:
            letters.append((b, 1))
            yield from extend(b.d0, letters)
            letters.pop()

    yield from extend(source, [])


@dataclass
class NetCommutatorResult:
    minus: np.ndarray
    plus: np.ndarray
    paths: int
    max_len: int
    report: CheckReport

    def vanishes(self, anti: bool = False, tol: float = DEFAULT_TOLERANCE) -> bool:
        value = self.plus if anti else self.minus
        return float(np.max(np.abs(value), initial=0.0)) < tol


def check_net_commutator(t: np.ndarray, t_prime: np.ndarray, nb: NetBundle, target: Region, source: Region,
                         omega: Sequence[Region], trivialization: Optional[Dict[Region, np.ndarray]] = None,
                         max_len: Optional[int] = None, path_length_factor: int = 2,
                         tol: float = DEFAULT_TOLERANCE) -> NetCommutatorResult:
    """
    The net commutator of T at ``target`` and T' at ``source`` over every path
    inside omega of at most ``path_length_factor * |omega|`` letters.

    All of them must agree; the report records each path's distance from the first.
    """
    omega = list(omega)
    if source not in omega or target not in omega:
        raise TrivializationError(f"{source} and {target} must both lie in the region set")
    if trivialization is None:
        trivialization = auto_trivialization(nb, omega)
    if max_len is None:
        max_len = path_length_factor * len(omega)
    report = CheckReport("net-commutator-path-independence", tolerance=tol)
    first = None
    for path in paths_within(nb.poset, omega, source, target, max_len):
        minus, plus = net_commutator(t, t_prime, nb, path, trivialization, tol)
        if first is None:
            first = (minus, plus)
        report.record(path, max(distance(minus, first[0]), distance(plus, first[1])))
    if first is None:
        raise TrivializationError(f"no path from {source} to {target} inside the region set "
                                  f"within {max_len} letters")
    report.notes.append(f"bounded check: paths of at most {max_len} letters inside {len(omega)} regions")
    logger.debug(f"Net commutator checked on {report.checked} paths {source} -> {target}")
    return NetCommutatorResult(first[0], first[1], report.checked, max_len, report)


# --- algebra nets and representations ---------------------------------------------

@dataclass
class AlgebraNet:
    """Local algebras A_a with connecting maps j_{a'a} = Ad unitary."""
    poset: Poset
    algebras: Dict[Region, LocalAlgebra]
    implementers: Dict[Pair, np.ndarray] = field(default_factory=dict)

    def j(self, a: Region, b: Region, t: np.ndarray) -> np.ndarray:
        u = self.implementers.get((a, b))
        return t if u is None else conjugate_by(u, t)

    def verify(self, tol: float = DEFAULT_TOLERANCE) -> CheckReport:
        """Each j_{a'a} maps A_a into A_a', and j composes along chains."""
        report = CheckReport("net-isotony", tolerance=tol)
        for lo, hi in self.poset.strict_pairs():
            for k, t in enumerate(self.algebras[lo].generators()):
                if not self.algebras[hi].contains(self.j(lo, hi, t), tol):
                    report.fail(f"{lo}->{hi}#{k}", "image leaves the larger algebra")
                else:
                    report.record(f"{lo}->{hi}#{k}", 0.0)
        for lo, mid, hi in self.poset.chains3():
            for t in self.algebras[lo].generators()[:4]:
                report.record(f"{lo}<{mid}<{hi}", distance(self.j(mid, hi, self.j(lo, mid, t)), self.j(lo, hi, t)))
        return report


class Representation:
    """
    A pair (pi, U) of an algebra net on a Hilbert net bundle.

    ``pi[a]`` maps A_a into the fibre operators; identity when omitted.
    """

    def __init__(self, net: AlgebraNet, bundle: NetBundle,
                 pi: Optional[Dict[Region, Callable[[np.ndarray], np.ndarray]]] = None):
        if net.poset is not bundle.poset:
            raise PosetError("representation and bundle live on different posets")
        self.net = net
        self.bundle = bundle
        self.pi = pi or {}

    def apply(self, a: Region, t: np.ndarray) -> np.ndarray:
        f = self.pi.get(a)
        return t if f is None else f(t)

    def verify(self, tol: float = DEFAULT_TOLERANCE) -> CheckReport:
        """Ad U_{a'a} o pi_a = pi_a' o j_{a'a} on the generators of every A_a."""
        report = CheckReport("representation-covariance", tolerance=tol)
        for lo, hi in self.bundle.poset.strict_pairs():
            u = self.bundle.map(lo, hi)
            for k, t in enumerate(self.net.algebras[lo].generators()):
                lhs = conjugate_by(u, self.apply(lo, t))
                rhs = self.apply(hi, self.net.j(lo, hi, t))
                report.record(f"{lo}->{hi}#{k}", distance(lhs, rhs))
        return report
