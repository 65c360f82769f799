# src/hnets/gauge/twistkit.py

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

import numpy as np

from hnets.algebra.groupkit import GradedGroup
from hnets.algebra.local_algebras import LocalAlgebra
from hnets.algebra.netbundle import NetBundle, auto_trivialization, from_holonomy, holonomy_of, net_commutator
from hnets.exceptions import FluxError, GroupError, NormalizerError, PathError
from hnets.models import CheckReport, Path, PathFrame, Pi1Presentation, Region, Simplex1
from hnets.sectors.lattice import LatticeFieldNet
from hnets.topology.homotopy import HolonomyMorphism, edge_windings, homotopy_engine, standard_loop
from hnets.topology.poset_core import Poset
from hnets.topology.simplicial import build_path_frame
from hnets.utils.calculations import (DEFAULT_TOLERANCE, conjugate_by, dagger, distance, intertwiner_space,
                                      polar_unitary)

logger = logging.getLogger(__name__)

Pair = Tuple[Region, Region]


@dataclass
class FieldSystem:
    """
    A net of field algebras F_a with connecting maps j_{a'a} = Ad U_{a'a}, the
    Hilbert net bundle U, and the gauge group acting by Ad on every fibre.

    The gauge action on each fibre is by the same matrices; a twist changes
    the connecting maps and the group bundle î_{a'a} = Ad U_{a'a} on G.
    """
    poset: Poset
    field_algebras: Dict[Region, LocalAlgebra]
    field_generators: Dict[Region, List[np.ndarray]]
    observable_generators: Dict[Region, List[np.ndarray]]
    bundle: NetBundle
    gauge: GradedGroup
    name: str = ""
    reports: List[CheckReport] = field(default_factory=list)

    @property
    def dim(self) -> int:
        return self.bundle.dim

    @property
    def gamma(self) -> np.ndarray:
        return self.gauge.group.matrix(self.gauge.gamma)

    def j(self, a: Region, b: Region, t: np.ndarray) -> np.ndarray:
        return conjugate_by(self.bundle.map(a, b), t)

    def gauge_map(self, a: Region, b: Region, g: int) -> int:
        """î_{a'a}(g) as a group index."""
        group = self.gauge.group
        return group.index_of(conjugate_by(self.bundle.map(a, b), group.matrix(g)))


def untwisted_system(model: LatticeFieldNet) -> FieldSystem:
    poset = model.poset
    return FieldSystem(
        poset=poset,
        field_algebras=model.field_algebras,
        field_generators={a: model.field_generators(a) for a in poset.regions},
        observable_generators={a: model.observable_generators(a) for a in poset.regions},
        bundle=NetBundle.trivial(poset, model.dim, name=f"trivial/{poset.name}"),
        gauge=model.gauge_group,
        name=f"lattice({model.sites},{model.gauge_n})",
    )


def check_normalizer(system: FieldSystem, w: np.ndarray, label: str = "", tol: float = DEFAULT_TOLERANCE):
    """W F_a W* = F_a for all a, W G W* = G and W gamma = gamma W; NormalizerError otherwise."""
    for a in system.poset.regions:
        for k, t in enumerate(system.field_generators[a]):
            if not system.field_algebras[a].contains(conjugate_by(w, t), tol):
                raise NormalizerError(f"{label} moves generator {k} out of F_{a}", witness=(label, a))
    group = system.gauge.group
    for g in range(group.order):
        try:
            group.index_of(conjugate_by(w, group.matrix(g)), tol)
        except GroupError:
            raise NormalizerError(f"{label} conjugates {group.label(g)} out of the gauge group",
                                  witness=(label, group.label(g))) from None
    if distance(w @ system.gamma, system.gamma @ w) >= tol:
        raise NormalizerError(f"{label} does not commute with the grading", witness=(label, "gamma"))


def twist_field_net(base: FieldSystem, chi: HolonomyMorphism, frame: PathFrame,
                    tol: float = DEFAULT_TOLERANCE) -> FieldSystem:
    """
    The field system twisted by a holonomy in the normalizer of (G, gamma):
    U_{a'a} = chi(frame-conjugated inclusion), j = Ad U, î = Ad U on G.
    """
    if frame.pole not in base.poset:
        raise PathError(f"frame pole {frame.pole} is not in {base.poset.name}", witness=frame.pole)
    if chi.presentation.poset is not base.poset:
        raise PathError("holonomy is presented on a different poset")
    for k, w in enumerate(chi.images):
        check_normalizer(base, w, label=f"chi(g{k})", tol=tol)

    bundle = from_holonomy(chi, frame, base.poset)
    bundle.name = f"twisted/{base.poset.name}"
    twisted = FieldSystem(base.poset, base.field_algebras, base.field_generators, base.observable_generators,
                          bundle, base.gauge, name=f"{base.name}^chi")
    twisted.reports = verify_twisted_system(twisted, chi, frame, tol)
    logger.info(f"Twisted {base.name}: " + ", ".join(f"{r.law}={'pass' if r.passed else 'FAIL'}"
                                                     for r in twisted.reports))
    return twisted


def verify_twisted_system(system: FieldSystem, chi: HolonomyMorphism, frame: PathFrame,
                          tol: float = DEFAULT_TOLERANCE) -> List[CheckReport]:
    poset = system.poset
    group = system.gauge.group

    holonomy = CheckReport("holonomy-equality", tolerance=tol)
    hol = holonomy_of(system.bundle, frame, chi.presentation, tol)
    for k, (a, b) in enumerate(zip(hol.images, chi.images)):
        if group.elements is not None and all(_in_group(group, m, tol) for m in (a, b)):
            same = group.index_of(a, tol) == group.index_of(b, tol)
            holonomy.record(f"g{k}", 0.0 if same else float("inf"))
        else:
            holonomy.record(f"g{k}", distance(a, b))

    isotony = CheckReport("twisted-isotony", tolerance=tol)
    equivariance = CheckReport("gauge-equivariance", tolerance=tol)
    gauge_gens = _group_generators(group)
    for lo, hi in poset.strict_pairs():
        for k, t in enumerate(system.field_generators[lo]):
            moved = system.j(lo, hi, t)
            if system.field_algebras[hi].contains(moved, tol):
                isotony.record(f"{lo}->{hi}#{k}", 0.0)
            else:
                isotony.fail(f"{lo}->{hi}#{k}", "j leaves F_a'")
            for g in gauge_gens:
                lhs = conjugate_by(group.matrix(system.gauge_map(lo, hi, g)), moved)
                rhs = system.j(lo, hi, conjugate_by(group.matrix(g), t))
                equivariance.record(f"{lo}->{hi}#{k}/{group.label(g)}", distance(lhs, rhs))

    normality = CheckReport("normal-commutation", tolerance=tol)
    causality = CheckReport("observable-causality", tolerance=tol)
    for a in poset.regions:
        for o in poset.regions:
            if a.id >= o.id or not poset.perp(a, o):
                continue
            uppers = poset.common_upper_bounds(a, o)
            if not uppers:
                continue
            x = uppers[0]
            path = Path.of(Simplex1(o, a, x))
            omega = poset.below(x)
            triv = auto_trivialization(system.bundle, omega)
            for s in system.field_generators[a]:
                for t in system.field_generators[o]:
                    _, anti = net_commutator(s, t, system.bundle, path, triv, tol)
                    normality.record(f"{a}|{o}", float(np.max(np.abs(anti))))
            for s in system.observable_generators[a]:
                for t in system.observable_generators[o]:
                    comm, _ = net_commutator(s, t, system.bundle, path, triv, tol)
                    causality.record(f"{a}|{o}", float(np.max(np.abs(comm))))
    if not normality.checked:
        normality.notes.append("no causally disjoint pair has a common upper bound")
    reports = [holonomy, isotony, equivariance, normality, causality]

    # a holonomy inside the gauge group leaves R_a and its inclusions alone
    if group.elements is not None and all(_in_group(group, w, tol) for w in chi.images):
        fixed = CheckReport("observable-net-fixed", tolerance=tol)
        for lo, hi in poset.strict_pairs():
            for k, t in enumerate(system.observable_generators[lo]):
                fixed.record(f"{lo}->{hi}#{k}", distance(system.j(lo, hi, t), t))
        reports.append(fixed)
    return reports


def _in_group(group, m: np.ndarray, tol: float) -> bool:
    try:
        group.index_of(m, tol)
        return True
    except GroupError:
        return False


def _group_generators(group) -> List[int]:
    """A small generating set, greedily."""
    gens, span = [], {group.identity_index}
    for g in range(group.order):
        if g not in span:
            gens.append(g)
            span = set(group.subgroup_closure(gens))
    return gens


@dataclass
class EquivalenceResult:
    verdict: str
    witness: Optional[Dict[Region, np.ndarray]] = None
    obstruction: Optional[str] = None
    notes: List[str] = field(default_factory=list)


def _check_equivalence_family(sys1: FieldSystem, sys2: FieldSystem, nu: Dict[Region, np.ndarray],
                              tol: float) -> bool:
    poset = sys1.poset
    group = sys1.gauge.group
    for (a, b), u in sys1.bundle.connect.items():
        if distance(nu[b] @ u, sys2.bundle.map(a, b) @ nu[a]) >= tol * 1e3:
            return False
    for a in poset.regions:
        if distance(nu[a] @ sys1.gamma, sys2.gamma @ nu[a]) >= tol * 1e3:
            return False
        for t in sys1.field_generators[a]:
            if not sys2.field_algebras[a].contains(conjugate_by(nu[a], t), tol * 1e3):
                return False
        for g in _group_generators(group):
            if not _in_group(sys2.gauge.group, conjugate_by(nu[a], group.matrix(g)), tol * 1e3):
                return False
    return True


def test_equivalence(sys1: FieldSystem, sys2: FieldSystem, frame: Optional[PathFrame] = None,
                     tol: float = DEFAULT_TOLERANCE, max_dim: int = 32) -> EquivalenceResult:
    """
    Look for a unitary family nu with nu U1 = U2 nu that carries F, G and gamma
    of one system onto the other.

    Non-conjugate holonomies decide inequivalence. Otherwise candidates are
    spread from the pole along the frame: the identity, the gauge elements,
    and the unitary part of the holonomy intertwiner space when it is small
    enough to solve.
    """
    if sys1.poset is not sys2.poset or sys1.dim != sys2.dim:
        return EquivalenceResult("inequivalent", obstruction="different bases or fibre dimensions")
    poset = sys1.poset
    frame = frame or build_path_frame(poset, poset.regions[0])
    pres = homotopy_engine(poset).presentation
    h1 = holonomy_of(sys1.bundle, frame, pres, tol)
    h2 = holonomy_of(sys2.bundle, frame, pres, tol)

    for k, (a, b) in enumerate(zip(h1.images, h2.images)):
        ea, eb = np.sort_complex(np.linalg.eigvals(a).round(8)), np.sort_complex(np.linalg.eigvals(b).round(8))
        if distance(ea, eb) > 1e-6:
            return EquivalenceResult(
                "inequivalent",
                obstruction=f"holonomies of generator {k} are not conjugate "
                            f"(traces {complex(np.trace(a)):.6g} vs {complex(np.trace(b)):.6g})")

    candidates: List[np.ndarray] = []
    if all(distance(a, b) < tol for a, b in zip(h1.images, h2.images)):
        candidates.append(np.eye(sys1.dim, dtype=complex))
    group = sys1.gauge.group
    candidates.extend(group.matrix(g) for g in range(group.order) if g != group.identity_index)
    decisive = False
    notes = []
    if sys1.dim <= max_dim and pres.rank:
        basis = intertwiner_space(h1.images, h2.images, tol=tol, max_dim=max_dim)
        if not basis:
            return EquivalenceResult("inequivalent", obstruction="holonomies admit no intertwiner")
        rng = np.random.default_rng(0)
        combo = sum((rng.normal() + 1j * rng.normal()) * m for m in basis)
        candidates.insert(0, polar_unitary(combo))
        decisive = len(basis) == 1
    else:
        notes.append("intertwiner space not solved; search limited to identity and gauge elements")

    for x in candidates:
        if any(distance(x @ a, b @ x) >= 1e3 * tol for a, b in zip(h1.images, h2.images)):
            continue
        nu = {a: sys2.bundle.transport(frame.path_to(a)) @ x @ dagger(sys1.bundle.transport(frame.path_to(a)))
              for a in poset.regions}
        if _check_equivalence_family(sys1, sys2, nu, tol):
            logger.info(f"{sys1.name} and {sys2.name} are equivalent")
            return EquivalenceResult("equivalent", witness=nu, notes=notes)
    if decisive:
        return EquivalenceResult("inequivalent", obstruction="the unique intertwiner fails the field conditions",
                                 notes=notes)
    notes.append("finite search exhausted without a witness")
    return EquivalenceResult("unknown", notes=notes)


test_equivalence.__test__ = False


# --- background potentials -------------------------------------------------------

@dataclass
class PotentialCochain:
    """
    Lambda_{o'o} on inclusions of a circle base with a prescribed flux.

    Primitives are fixed to zero along the spanning tree, so every inclusion
    carries Lambda = -theta * (its winding).
    """
    poset: Poset
    theta: Fraction
    lam: Dict[Pair, Fraction]
    primitives: Dict[Region, Fraction]
    presentation: Pi1Presentation = field(repr=False)
    windings: Dict[Simplex1, int] = field(repr=False)

    def lambda_pair(self, lo: Region, hi: Region) -> Fraction:
        if lo == hi:
            return Fraction(0)
        return self.lam[(lo, hi)]

    def lambda_b(self, b: Simplex1) -> Fraction:
        """Lambda_b = Lambda_{|b| d0 b} - Lambda_{|b| d1 b}."""
        return self.lambda_pair(b.d0, b.support) - self.lambda_pair(b.d1, b.support)

    def loop_sum(self, path: Path) -> Fraction:
        return sum((o * self.lambda_b(b) for b, o in path.word), Fraction(0))

    def character(self, path: Path) -> complex:
        return complex(np.exp(2j * np.pi * float(self.loop_sum(path))))

    def verify(self) -> CheckReport:
        report = CheckReport("potential-additivity", tolerance=DEFAULT_TOLERANCE)
        for lo, mid, hi in self.poset.chains3():
            residual = self.lambda_pair(mid, hi) + self.lambda_pair(lo, mid) - self.lambda_pair(lo, hi)
            report.record(f"{lo}<{mid}<{hi}", abs(float(residual)))
        return report


def potential_from_flux(poset: Poset, theta) -> PotentialCochain:
    theta = Fraction(theta).limit_denominator(10 ** 6) if not isinstance(theta, Fraction) else theta
    engine = homotopy_engine(poset)
    try:
        windings = edge_windings(engine)
    except PathError as e:
        raise FluxError(f"{poset.name} does not have the topology of a circle: {e}") from None
    lam = {}
    for lo, hi in poset.strict_pairs():
        lam[(lo, hi)] = -theta * windings.get(Simplex1(lo, hi, hi), 0)
    primitives = {r: Fraction(0) for r in poset.regions}
    pot = PotentialCochain(poset, theta, lam, primitives, engine.presentation, windings)
    logger.info(f"Potential on {poset.name} with flux {theta}")
    return pot


@dataclass
class PhaseReport:
    theta: Fraction
    winding: int
    expected: complex
    measured: complex
    report: CheckReport


def ab_twist(model: LatticeFieldNet, pot: PotentialCochain, winding: int = 1,
             tol: float = DEFAULT_TOLERANCE) -> Tuple[FieldSystem, PhaseReport]:
    """
    Twist by U_{o'o} = V_{exp(-2 pi i Lambda_{o'o})} and measure the phase
    picked up by creation operators around a loop of the given winding.
    """
    q = pot.theta.denominator
    if (2 * model.gauge_n) % q:
        raise FluxError(f"flux {pot.theta} needs phases of order {q}, the gauge group has order {2 * model.gauge_n}")
    if pot.poset is not model.poset:
        raise FluxError("potential and model live on different posets")
    connect = {(lo, hi): model.phase_unitary(np.exp(-2j * np.pi * float(pot.lambda_pair(lo, hi))))
               for lo, hi in model.poset.strict_pairs()}
    base = untwisted_system(model)
    bundle = NetBundle(model.poset, connect, dim=model.dim, name=f"ab/{pot.theta}")
    system = FieldSystem(base.poset, base.field_algebras, base.field_generators, base.observable_generators,
                         bundle, base.gauge, name=f"{base.name}^AB({pot.theta})")

    loop = standard_loop(model.poset).power(winding)
    u_p = bundle.transport(loop)
    expected = complex(np.exp(2j * np.pi * float(pot.theta) * winding))
    report = CheckReport("ab-phase", tolerance=tol)
    for j in range(model.sites):
        report.record(f"a{j}*", distance(conjugate_by(u_p, model.creation(j)), expected * model.creation(j)))
    for a in model.poset.regions:
        for k, t in enumerate(model.observable_generators(a)):
            report.record(f"R_{a}#{k}", distance(conjugate_by(u_p, t), t))
    measured = complex(np.vdot(model.creation(0).reshape(-1), conjugate_by(u_p, model.creation(0)).reshape(-1))
                       / np.vdot(model.creation(0).reshape(-1), model.creation(0).reshape(-1)))
    system.reports = [report, pot.verify()]
    logger.info(f"AB phase for theta={pot.theta}, w={winding}: {measured:.6f} (expected {expected:.6f})")
    return system, PhaseReport(pot.theta, winding, expected, measured, report)


def winding_hom(model_or_poset, images_per_winding: np.ndarray, dim: int) -> HolonomyMorphism:
    """chi(g) = W^(winding of g) for every generator of the circle presentation."""
    poset = model_or_poset.poset if isinstance(model_or_poset, LatticeFieldNet) else model_or_poset
    engine = homotopy_engine(poset)
    pres = engine.presentation
    windings = edge_windings(engine)
    images = [np.linalg.matrix_power(images_per_winding, windings[g]) if windings[g] >= 0
              else np.linalg.matrix_power(dagger(images_per_winding), -windings[g]) for g in pres.generators]
    return HolonomyMorphism(pres, images, dim=dim)


def bmt_twist(model: LatticeFieldNet, kappa: int = 1, winding: int = 1, frame: Optional[PathFrame] = None,
              tol: float = DEFAULT_TOLERANCE) -> Tuple[FieldSystem, CheckReport]:
    """Twist by chi(1) = V^kappa; charged fields pick up exp(i pi kappa w / n) around a winding-w loop."""
    chi = winding_hom(model, model.gauge_unitary(kappa), model.dim)
    frame = frame or build_path_frame(model.poset, model.poset.regions[0])
    system = twist_field_net(untwisted_system(model), chi, frame, tol)
    pole = frame.pole
    loop = frame.path_to(standard_loop(model.poset).source)
    loop = loop.then(standard_loop(model.poset).power(winding)).then(loop.reverse())
    u_p = system.bundle.transport(loop)
    expected = np.exp(1j * np.pi * kappa * winding / model.gauge_n)
    report = CheckReport("bmt-phase", tolerance=tol)
    for j in range(model.sites):
        report.record(f"a{j}*@{pole}", distance(conjugate_by(u_p, model.creation(j)), expected * model.creation(j)))
    return system, report
