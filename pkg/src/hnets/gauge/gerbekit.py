# src/hnets/gauge/gerbekit.py

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

import networkx as nx
import numpy as np

from hnets.algebra.groupkit import FiniteGroup, NormalizerData, automorphism_of, make_pauli_group
from hnets.exceptions import GroupError, LiftChoiceError
from hnets.models import CheckReport, Path, PathFrame, Region, Simplex1, Simplex2
from hnets.topology.homotopy import HolonomyMorphism, edge_windings, homotopy_engine, path_word
from hnets.topology.poset_core import Poset, build_minimal_circle_base, build_product_base
from hnets.topology.simplicial import enumerate_simplices, nerve_subsets
from hnets.utils.calculations import DEFAULT_TOLERANCE, conjugate_by, distance
from hnets.utils.integer_linalg import solve_congruences

logger = logging.getLogger(__name__)

DOMAINS = ("nerve", "full")

Pair = Tuple[Region, Region]


def domain_simplices(poset: Poset, domain: str) -> Tuple[List[Simplex1], List[Simplex2]]:
    if domain not in DOMAINS:
        raise ValueError(f"unknown gerbe domain {domain!r}")
    if domain == "nerve":
        return nerve_subsets(poset)
    return enumerate_simplices(poset, 1), enumerate_simplices(poset, 2)


@dataclass
class Gerbe:
    """
    A G-gerbe: automorphisms i_b of G (permutations of its indices) on
    1-simplices and elements delta_c on 2-simplices.
    """
    poset: Poset
    group: FiniteGroup
    i: Dict[Simplex1, Tuple[int, ...]]
    delta: Dict[Simplex2, int]
    domain: str = "nerve"

    def is_group_bundle(self) -> bool:
        return all(d == self.group.identity_index for d in self.delta.values())


def check_gerbe_relation(gerbe: Gerbe) -> CheckReport:
    """Ad delta_c o i_{d1 c} = i_{d0 c} o i_{d2 c}, exactly on the table."""
    report = CheckReport("gerbe-relation", tolerance=0.5)
    g = gerbe.group
    for c, d in gerbe.delta.items():
        i0, i1, i2 = gerbe.i[c.d0], gerbe.i[c.d1], gerbe.i[c.d2]
        bad = [h for h in range(g.order) if g.conjugate(d, i1[h]) != i0[i2[h]]]
        if bad:
            report.fail(c, f"fails on {g.label(bad[0])}")
        else:
            report.record(c, 0.0)
    return report


def _coset_value(chibar: HolonomyMorphism, frame: PathFrame, b: Simplex1) -> int:
    pres = chibar.presentation
    to_base = frame.path_to(pres.basepoint)
    loop = frame.path_to(b.d1).then(Path.of(b)).then(frame.path_from(b.d0))
    return chibar.evaluate_word_index(path_word(pres, to_base.reverse().then(loop).then(to_base)))


def gerbe_from_projective(chibar: HolonomyMorphism, frame: PathFrame, normalizer: NormalizerData,
                          lift_choice: Union[str, Dict[Simplex1, int]] = "canonical",
                          rng: Optional[np.random.Generator] = None,
                          domain: str = "nerve") -> Tuple[Gerbe, Dict[Simplex1, int]]:
    """
    Lift the N/G-valued transport V_b^down = chibar(frame loop through b) to
    representatives V_b in N; delta_c = V_{d0 c} V_{d2 c} V_{d1 c}^-1 and i_b = Ad V_b.

    ``lift_choice`` is "canonical" (first coset element), "random" (uses ``rng``)
    or an explicit map from 1-simplices to elements of N.
    """
    poset = chibar.presentation.poset
    ambient = normalizer.ambient
    ones, twos = domain_simplices(poset, domain)
    rng = rng or np.random.default_rng(0)

    lifts: Dict[Simplex1, int] = {}
    for b in ones:
        q = _coset_value(chibar, frame, b)
        if isinstance(lift_choice, dict):
            if b not in lift_choice:
                raise LiftChoiceError(f"no lift chosen for {b}", witness=b)
            n = int(lift_choice[b])
            if normalizer.project(n) != q:
                raise LiftChoiceError(f"lift {ambient.label(n)} of {b} is not in the coset "
                                      f"{normalizer.quotient_group().label(q)}", witness=b)
        elif lift_choice == "canonical":
            n = ambient.identity_index if q == normalizer.project(ambient.identity_index) else normalizer.representative(q)
        elif lift_choice == "random":
            coset = normalizer.cosets[q]
            n = coset[int(rng.integers(len(coset)))]
        else:
            raise LiftChoiceError(f"unknown lift choice {lift_choice!r}")
        lifts[b] = n
    gerbe = _gerbe_from_lifts(poset, normalizer, lifts, twos, domain)
    logger.info(f"Gerbe from projective holonomy on {poset.name}: {len(ones)} lifts, "
                f"{sum(1 for d in gerbe.delta.values() if d != gerbe.group.identity_index)} nontrivial deltas")
    return gerbe, lifts


def _gerbe_from_lifts(poset: Poset, normalizer: NormalizerData, lifts: Dict[Simplex1, int],
                      twos: Sequence[Simplex2], domain: str) -> Gerbe:
    ambient = normalizer.ambient
    delta = {}
    for c in twos:
        n = ambient.mul(ambient.mul(lifts[c.d0], lifts[c.d2]), ambient.inverse(lifts[c.d1]))
        if not normalizer.in_normal(n):
            raise GroupError(f"du({c}) = {ambient.label(n)} is not in the normal subgroup", witness=c)
        delta[c] = normalizer.ambient_to_normal(n)
    i = {b: tuple(automorphism_of(ambient, normalizer, n)) for b, n in lifts.items()}
    return Gerbe(poset, normalizer.normal, i, delta, domain)


def gerbe_from_cochain(u: Dict[Simplex1, int], normalizer: NormalizerData, poset: Poset,
                       domain: str = "nerve") -> Gerbe:
    """i = Ad u and delta = du for an N-valued cochain with du in G."""
    _, twos = domain_simplices(poset, domain)
    return _gerbe_from_lifts(poset, normalizer, u, twos, domain)


def recoordinatize(gerbe: Gerbe, g: Dict[Simplex1, int]) -> Gerbe:
    """
    i'_b = Ad g_b o i_b and delta'_c = g_{d0 c} i_{d0 c}(g_{d2 c}) delta_c g_{d1 c}^-1,
    the gerbe of the lifts g_b V_b.
    """
    grp = gerbe.group
    i = {b: tuple(grp.conjugate(g[b], perm[h]) for h in range(grp.order)) for b, perm in gerbe.i.items()}
    delta = {}
    for c, d in gerbe.delta.items():
        x = grp.mul(grp.mul(g[c.d0], gerbe.i[c.d0][g[c.d2]]), d)
        delta[c] = grp.mul(x, grp.inverse(g[c.d1]))
    return Gerbe(gerbe.poset, grp, i, delta, gerbe.domain)


def _cyclic_generator(group: FiniteGroup) -> Optional[int]:
    for x in range(group.order):
        if group.element_order(x) == group.order:
            return x
    return None


def delta_class_trivial(gerbe: Gerbe) -> Optional[bool]:
    """
    Whether some recoordinatization makes delta identically 1, decided by
    linear congruences when G is cyclic and every i_b is trivial.
    None when the gerbe is outside that case.
    """
    grp = gerbe.group
    identity_perm = tuple(range(grp.order))
    if any(perm != identity_perm for perm in gerbe.i.values()):
        return None
    gen = _cyclic_generator(grp)
    if gen is None:
        return None
    k = grp.order
    log = {}
    acc = grp.identity_index
    for e in range(k):
        log[acc] = e
        acc = grp.mul(acc, gen)
    ones = sorted(gerbe.i, key=lambda b: b.key)
    column = {b: j for j, b in enumerate(ones)}
    rows, rhs = [], []
    for c, d in sorted(gerbe.delta.items(), key=lambda kv: kv[0].key):
        row = [0] * len(ones)
        row[column[c.d0]] += 1
        row[column[c.d2]] += 1
        row[column[c.d1]] -= 1
        rows.append(row)
        rhs.append((-log[d]) % k)
    if not rows:
        return True
    solution = solve_congruences(np.array(rows, dtype=object), np.array(rhs, dtype=object), k)
    return solution is not None


# --- lift classification -----------------------------------------------------------

@dataclass
class LiftProblem:
    """An N-valued cochain u on the inclusions of a poset with du in G on every chain."""
    poset: Poset
    normalizer: NormalizerData
    u: Dict[Pair, int]

    def verify(self):
        amb = self.normalizer.ambient
        for lo, mid, hi in self.poset.chains3():
            n = amb.mul(amb.mul(self.u[(mid, hi)], self.u[(lo, mid)]), amb.inverse(self.u[(lo, hi)]))
            if not self.normalizer.in_normal(n):
                raise GroupError(f"du on {lo}<{mid}<{hi} is {amb.label(n)}, outside the normal subgroup",
                                 witness=(lo, mid, hi))

    @classmethod
    def from_lifts(cls, poset: Poset, normalizer: NormalizerData, lifts: Dict[Simplex1, int]) -> "LiftProblem":
        return cls(poset, normalizer, {(lo, hi): lifts[Simplex1(lo, hi, hi)] for lo, hi in poset.strict_pairs()})


@dataclass
class LiftClassification:
    status: str
    solutions: List[Dict[Pair, int]] = field(default_factory=list)
    searched: int = 0
    bound: int = 0
    fixed: int = 0
    free: int = 0


def classify_lifts(prob: LiftProblem, bound: int = 10 ** 7, max_solutions: int = 16) -> LiftClassification:
    """
    Cocycles z with z(e) in u(e)G on every inclusion, modulo the vertex gauges.

    z is fixed to u on a spanning tree of covering pairs; the remaining
    inclusions are searched depth first with forced values propagated along
    the chains. An empty result after a complete search is a certificate;
    more than ``bound`` search nodes gives "undecided".
    """
    prob.verify()
    poset = prob.poset
    amb = prob.normalizer.ambient
    cosets = {pair: prob.normalizer.cosets[prob.normalizer.project(n)] for pair, n in prob.u.items()}

    tree = set()
    graph = nx.Graph()
    graph.add_nodes_from(r.id for r in poset.regions)
    graph.add_edges_from((lo.id, hi.id) for lo, hi in poset.covers)
    for u_id, v_id in nx.minimum_spanning_edges(graph, algorithm="kruskal", data=False):
        lo, hi = poset.region(u_id), poset.region(v_id)
        if not poset.leq(lo, hi):
            lo, hi = hi, lo
        tree.add((lo, hi))

    chains = poset.chains3()
    by_pair: Dict[Pair, List[Tuple[Region, Region, Region]]] = {}
    for ch in chains:
        lo, mid, hi = ch
        for pair in ((lo, mid), (mid, hi), (lo, hi)):
            by_pair.setdefault(pair, []).append(ch)

    assignment: Dict[Pair, int] = {pair: prob.u[pair] for pair in tree}
    variables = sorted((p for p in prob.u if p not in tree), key=lambda p: (-len(by_pair.get(p, ())), p[0].id, p[1].id))
    solutions: List[Dict[Pair, int]] = []
    nodes = 0

    class _Enough(Exception):
        pass

    class _Budget(Exception):
        pass

    def consistent_and_propagate(changed: List[Pair]) -> Optional[List[Pair]]:
        """Propagate forced values; returns the pairs newly assigned, or None on contradiction."""
        added = []
        queue = list(changed)
        while queue:
            pair = queue.pop()
            for lo, mid, hi in by_pair.get(pair, ()):
                a, b, c = (lo, mid), (mid, hi), (lo, hi)
                va, vb, vc = assignment.get(a), assignment.get(b), assignment.get(c)
                known = sum(x is not None for x in (va, vb, vc))
                if known == 3:
                    if amb.mul(vb, va) != vc:
                        return _undo(added)
                elif known == 2:
                    if vc is None:
                        target, value = c, amb.mul(vb, va)
                    elif vb is None:
                        target, value = b, amb.mul(vc, amb.inverse(va))
                    else:
                        target, value = a, amb.mul(amb.inverse(vb), vc)
                    if value not in cosets[target]:
                        return _undo(added)
                    assignment[target] = value
                    added.append(target)
                    queue.append(target)
        return added

    def _undo(added: List[Pair]):
        for p in added:
            del assignment[p]
        return None

    def search(k: int):
        nonlocal nodes
        while k < len(variables) and variables[k] in assignment:
            k += 1
        if k == len(variables):
            solutions.append(dict(assignment))
            if len(solutions) >= max_solutions:
                raise _Enough
            return
        pair = variables[k]
        for value in cosets[pair]:
            nodes += 1
            if nodes > bound:
                raise _Budget
            assignment[pair] = value
            added = consistent_and_propagate([pair])
            if added is not None:
                search(k + 1)
                _undo(added)
            del assignment[pair]

    start = consistent_and_propagate(list(tree))
    if start is None:
        return LiftClassification("empty", [], 0, bound, len(tree), len(variables))
    try:
        search(0)
        status = "solutions" if solutions else "empty"
    except _Enough:
        status = "solutions"
    except _Budget:
        status = "solutions" if solutions else "undecided"
    for sol in solutions:
        for lo, mid, hi in chains:
            if amb.mul(sol[(mid, hi)], sol[(lo, mid)]) != sol[(lo, hi)]:
                raise GroupError(f"search returned a non-cocycle on {lo}<{mid}<{hi}")
    logger.info(f"Lift classification on {poset.name}: {status}, {len(solutions)} solutions, "
                f"{nodes} nodes (bound {bound}), {len(tree)} tree pairs fixed")
    return LiftClassification(status, solutions, nodes, bound, len(tree), len(variables))


@dataclass
class CommutatorObstruction:
    commutators: List[int]
    obstructed: bool


def commutator_obstruction(normalizer: NormalizerData, q1: int, q2: int) -> CommutatorObstruction:
    """Commutators n1 n2 n1^-1 n2^-1 over all preimages; obstructed when they all equal one non-identity element."""
    amb = normalizer.ambient
    values = sorted({amb.mul(amb.mul(n1, n2), amb.mul(amb.inverse(n1), amb.inverse(n2)))
                     for n1 in normalizer.cosets[q1] for n2 in normalizer.cosets[q2]})
    obstructed = len(values) == 1 and values[0] != amb.identity_index
    return CommutatorObstruction(values, obstructed)


# --- C*-gerbes -----------------------------------------------------------------

@dataclass
class GerbeFamily:
    """
    Algebras on the regions of a poset, connecting maps j_{a'a} = Ad unitary
    and a gauge action alpha(g) = Ad tau(g) of the gerbe's group.
    """
    poset: Poset
    generators: Dict[Region, List[np.ndarray]]
    implementers: Dict[Pair, np.ndarray]
    tau: List[np.ndarray]

    def j(self, a: Region, b: Region, t: np.ndarray) -> np.ndarray:
        return conjugate_by(self.implementers[(a, b)], t)

    def alpha(self, g: int, t: np.ndarray) -> np.ndarray:
        return conjugate_by(self.tau[g], t)


def flavour_family(gerbe: Gerbe, lifts: Dict[Simplex1, int], normalizer: NormalizerData,
                   inner_dim: int = 1) -> GerbeFamily:
    """M_d(C) x M_k(C) on every region with j = Ad(V_b x 1) and tau(g) = g x 1."""
    amb = normalizer.ambient
    d = amb.dim
    eye_k = np.eye(inner_dim, dtype=complex)
    gens = []
    for m in amb.elements:
        gens.append(np.kron(m, eye_k))
    for r in range(inner_dim):
        for s in range(inner_dim):
            e = np.zeros((inner_dim, inner_dim), dtype=complex)
            e[r, s] = 1
            gens.append(np.kron(np.eye(d), e))
    implementers = {(b.d1, b.d0): np.kron(amb.matrix(n), eye_k) for b, n in lifts.items() if b.is_inclusion}
    tau = [np.kron(gerbe.group.matrix(g), eye_k) for g in range(gerbe.group.order)]
    return GerbeFamily(gerbe.poset, {a: gens for a in gerbe.poset.regions}, implementers, tau)


def check_cstar_gerbe(gerbe: Gerbe, family: GerbeFamily, tol: float = DEFAULT_TOLERANCE) -> List[CheckReport]:
    """
    On chains: j_{|c| c1} o j_{c1 c0} = alpha(delta_c) o j_{|c| c0}; on inclusions:
    j o alpha(g) = alpha(i_b(g)) o j. The G-averaged generators must then compose as a net.
    """
    if gerbe.domain != "nerve":
        raise ValueError("C*-gerbe checks run on the nerve domain")
    net = CheckReport("gerbe-net-relation", tolerance=tol)
    equivariance = CheckReport("gerbe-equivariance", tolerance=tol)
    fixed = CheckReport("fixed-point-net", tolerance=tol)
    grp = gerbe.group
    for c, d in sorted(gerbe.delta.items(), key=lambda kv: kv[0].key):
        c0, c1, top = c.d2.d1, c.d2.d0, c.support
        for k, t in enumerate(family.generators[c0]):
            lhs = family.j(c1, top, family.j(c0, c1, t))
            rhs = family.alpha(d, family.j(c0, top, t))
            net.record(f"{c0}<{c1}<{top}#{k}", distance(lhs, rhs))
    for b, perm in sorted(gerbe.i.items(), key=lambda kv: kv[0].key):
        lo, hi = b.d1, b.d0
        for g in range(grp.order):
            for k, t in enumerate(family.generators[lo]):
                lhs = family.j(lo, hi, family.alpha(g, t))
                rhs = family.alpha(perm[g], family.j(lo, hi, t))
                equivariance.record(f"{b}/{grp.label(g)}#{k}", distance(lhs, rhs))
    for lo, mid, hi in gerbe.poset.chains3():
        for k, t in enumerate(family.generators[lo]):
            avg = sum(family.alpha(g, t) for g in range(grp.order)) / grp.order
            fixed.record(f"{lo}<{mid}<{hi}#{k}",
                         distance(family.j(mid, hi, family.j(lo, mid, avg)), family.j(lo, hi, avg)))
    return [net, equivariance, fixed]


# --- fixtures for projective holonomies -------------------------------------------

def product_windings(product: Poset, factor: Poset) -> Dict[Simplex1, Tuple[int, int]]:
    """Windings of every inclusion of factor x factor in each coordinate."""
    engine = homotopy_engine(factor)
    windings = edge_windings(engine)

    def factor_winding(lo_id: int, hi_id: int) -> int:
        if lo_id == hi_id:
            return 0
        lo, hi = factor.region(lo_id), factor.region(hi_id)
        return windings.get(Simplex1(lo, hi, hi), 0)

    result = {}
    for lo, hi in product.strict_pairs():
        _, a1, a2 = lo.payload
        _, b1, b2 = hi.payload
        result[Simplex1(lo, hi, hi)] = (factor_winding(a1, b1), factor_winding(a2, b2))
    return result


def pauli_projective_holonomy(factor: Optional[Poset] = None, first: str = "[X]",
                              second: str = "[Z]") -> Tuple[HolonomyMorphism, NormalizerData, Poset]:
    """
    On factor x factor (default: the minimal circle squared), the holonomy
    sending the two windings to the classes ``first`` and ``second`` of N/G.
    """
    factor = factor or build_minimal_circle_base()
    product = build_product_base(factor, factor)
    _, data = make_pauli_group()
    quotient = data.quotient_group()
    qx = data.coset_by_label(first)
    qz = data.coset_by_label(second)
    pres = homotopy_engine(product).presentation
    windings = product_windings(product, factor)
    potential = {r: tuple(sum(o * windings[b][k] for b, o in letters) for k in (0, 1))
                 for r, letters in pres.tree_paths.items()}
    indices = []
    for g in pres.generators:
        # tree gauge: the loop out the tree, across g and back
        w1, w2 = (potential[g.d1][k] + windings[g][k] - potential[g.d0][k] for k in (0, 1))
        indices.append(quotient.mul(quotient.power(qx, w1), quotient.power(qz, w2)))
    chibar = HolonomyMorphism(pres, group=quotient, indices=indices)
    chibar.check_relations()
    return chibar, data, product


def circle_projective_holonomy(base: Optional[Poset] = None, coset_label: str = "[X]") -> Tuple[HolonomyMorphism, NormalizerData, Poset]:
    """A Pauli-class holonomy on a circle base: the winding generator goes to one class of N/G."""
    base = base or build_minimal_circle_base()
    _, data = make_pauli_group()
    quotient = data.quotient_group()
    q = data.coset_by_label(coset_label)
    engine = homotopy_engine(base)
    windings = edge_windings(engine)
    indices = [quotient.power(q, windings[g]) for g in engine.presentation.generators]
    chibar = HolonomyMorphism(engine.presentation, group=quotient, indices=indices)
    chibar.check_relations()
    return chibar, data, base
