# src/hnets/topology/homotopy.py

import heapq
import logging
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

import networkx as nx
import numpy as np

from hnets.exceptions import DisconnectedPosetError, PathError, RelationViolation
from hnets.models import GenWord, Letter, Path, Pi1Presentation, Region, Simplex1, Simplex2, letter_source, letter_target
from hnets.topology.poset_core import Poset
from hnets.topology.simplicial import enumerate_simplices, simplex_graph
from hnets.utils.calculations import DEFAULT_TOLERANCE, distance, ordered_product
from hnets.utils.integer_linalg import abelian_invariants

logger = logging.getLogger(__name__)

SKELETONS = ("nerve", "full")


# --- free group words ------------------------------------------------------------

def invert_word(word: GenWord) -> GenWord:
    return tuple((g, -e) for g, e in reversed(word))


def free_reduce(word: Sequence[Tuple]) -> Tuple:
    out: List[Tuple] = []
    for letter in word:
        if out and out[-1][0] == letter[0] and out[-1][1] == -letter[1]:
            out.pop()
        else:
            out.append(letter)
    return tuple(out)


def cyclic_reduce(word: Sequence[Tuple]) -> Tuple:
    word = list(free_reduce(word))
    while len(word) >= 2 and word[0][0] == word[-1][0] and word[0][1] == -word[-1][1]:
        word = word[1:-1]
    return tuple(word)


def exponent_vector(word: GenWord, generators: Sequence[int]) -> Tuple[int, ...]:
    position = {g: k for k, g in enumerate(generators)}
    vec = [0] * len(generators)
    for g, e in word:
        vec[position[g]] += e
    return tuple(vec)


# --- presentations ---------------------------------------------------------------

def _spanning_tree(graph: nx.Graph, poset: Poset, basepoint: Region) -> Tuple[List[Tuple[int, int]], Dict[int, int]]:
    """BFS tree from the basepoint, larger regions visited first."""
    size = {r.id: len(poset.below(r)) for r in poset.regions}
    parent = {basepoint.id: basepoint.id}
    order = [basepoint.id]
    tree_edges = []
    head = 0
    while head < len(order):
        node = order[head]
        head += 1
        for nb in sorted(graph.neighbors(node), key=lambda k: (-size[k], k)):
            if nb not in parent:
                parent[nb] = node
                order.append(nb)
                tree_edges.append((node, nb))
    return tree_edges, parent


def pi1_presentation(poset: Poset, basepoint: Region, skeleton: str = "nerve") -> Pi1Presentation:
    """
    Edge-path presentation of π₁ of the poset.

    ``nerve``: 1-cells are the inclusions (a, o; o), a < o, 2-cells the strict
    chains. ``full``: 1-cells are all of Σ₁, 2-cells all of Σ₂. Both present
    the same group; ``full`` is only practical for small posets.
    """
    if skeleton not in SKELETONS:
        raise ValueError(f"unknown skeleton {skeleton!r}")
    poset.index(basepoint)
    if not poset.is_connected() and len(poset) > 1:
        comps = poset.components()
        stray = next(c[0] for c in comps if basepoint not in c)
        raise DisconnectedPosetError(f"{poset.name} is not connected; {stray} is unreachable from {basepoint}",
                                     witness=stray)

    if skeleton == "nerve":
        edges = [Simplex1(lo, hi, hi) for lo, hi in poset.strict_pairs()]
        edges.sort(key=lambda b: b.key)
        graph = poset.comparability_graph()
        tree_pairs, parent = _spanning_tree(graph, poset, basepoint)
        tree = []
        for u, v in tree_pairs:
            lo, hi = (u, v) if poset.leq(poset.region(u), poset.region(v)) else (v, u)
            tree.append(Simplex1(poset.region(lo), poset.region(hi), poset.region(hi)))
        cells = [((Simplex1(lo, mid, mid), 1), (Simplex1(mid, hi, hi), 1), (Simplex1(lo, hi, hi), -1))
                 for lo, mid, hi in poset.chains3()]
        witnesses = [(lo, mid, hi) for lo, mid, hi in poset.chains3()]
    else:
        edges = [b for b in enumerate_simplices(poset, 1)]
        graph = simplex_graph(poset)
        tree_pairs, parent = _spanning_tree(graph, poset, basepoint)
        tree = [Simplex1(poset.region(u), poset.region(v), poset.region(graph.edges[u, v]["support"]))
                for u, v in tree_pairs]
        sigma2 = enumerate_simplices(poset, 2)
        cells = [((c.d2, 1), (c.d0, 1), (c.d1, -1)) for c in sigma2]
        witnesses = list(sigma2)

    tree_set = set(tree)
    generators = tuple(b for b in edges if b not in tree_set)
    gen_index = {g: i for i, g in enumerate(generators)}

    # tree paths from the basepoint, in edge letters
    tree_paths: Dict[Region, Tuple[Letter, ...]] = {basepoint: ()}
    by_child = {}
    for b in tree:
        u, v = b.d1, b.d0
        if parent.get(v.id) == u.id:
            by_child[v.id] = (b, 1)
        else:
            by_child[u.id] = (b, -1)
    for u, v in tree_pairs:
        child = poset.region(v)
        tree_paths[child] = tree_paths[poset.region(u)] + (by_child[v],)

    relations, kept_witnesses = [], []
    for cell, witness in zip(cells, witnesses):
        word = cyclic_reduce(tuple((gen_index[b], o) for b, o in cell if b in gen_index))
        if word:
            relations.append(word)
            kept_witnesses.append(witness)

    pres = Pi1Presentation(
        basepoint=basepoint, skeleton=skeleton, edges=tuple(edges), tree=tuple(tree),
        generators=generators, relations=tuple(relations), witnesses=tuple(kept_witnesses),
        tree_paths=tree_paths, poset=poset,
    )
    logger.info(f"π₁ presentation of {poset.name} at {basepoint} ({skeleton}): "
                f"{len(generators)} generators, {len(relations)} relations")
    return pres


def edge_letters(pres: Pi1Presentation, letter: Letter) -> Tuple[Letter, ...]:
    """Rewrite one path letter as a word in the presentation's 1-cells."""
    simplex, orientation = letter
    if pres.skeleton == "full":
        return (letter,)
    s = simplex.support
    up = (Simplex1(simplex.d1, s, s), 1) if simplex.d1 != s else None
    down = (Simplex1(simplex.d0, s, s), -1) if simplex.d0 != s else None
    word = tuple(x for x in (up, down) if x is not None)
    if orientation < 0:
        word = tuple((b, -o) for b, o in reversed(word))
    return word


def path_word(pres: Pi1Presentation, path: Path) -> GenWord:
    """Generator word of a path in the tree gauge (tree letters deleted, freely reduced)."""
    poset = pres.poset
    for r in path.regions():
        if poset is not None and r not in poset:
            raise PathError(f"path leaves the poset at {r}", witness=r)
    word = []
    for letter in path.word:
        for b, o in edge_letters(pres, letter):
            g = pres.generator_index.get(b)
            if g is not None:
                word.append((g, o))
    return free_reduce(word)


def generator_loop(pres: Pi1Presentation, index: int) -> Path:
    """The loop at the basepoint running out the tree, across generator ``index`` and back."""
    g = pres.generators[index]
    out = pres.tree_paths[g.d1]
    back = tuple((b, -o) for b, o in reversed(pres.tree_paths[g.d0]))
    return Path.from_letters(out + ((g, 1),) + back, source=pres.basepoint)


def word_loop(pres: Pi1Presentation, word: GenWord) -> Path:
    path = Path.identity(pres.basepoint)
    for g, e in word:
        loop = generator_loop(pres, g)
        path = path.then(loop if e > 0 else loop.reverse())
    return path


# --- Tietze simplification -------------------------------------------------------

@dataclass
class ReducedPresentation:
    """
    Result of eliminating generators that occur exactly once in some relator.

    ``substitution`` expresses every eliminated generator as a word in the
    surviving ones.
    """
    generators: Tuple[int, ...]
    relators: Tuple[GenWord, ...]
    substitution: Dict[int, GenWord] = field(default_factory=dict)

    def rewrite(self, word: GenWord) -> GenWord:
        out = []
        for g, e in word:
            image = self.substitution.get(g)
            if image is None:
                out.append((g, e))
            else:
                out.extend(image if e > 0 else invert_word(image))
        return free_reduce(out)

    @property
    def is_trivial(self) -> bool:
        return not self.generators

    @property
    def is_free(self) -> bool:
        return not self.relators

    @property
    def is_free_abelian(self) -> bool:
        """Exactly the commutator relators of all pairs of surviving generators."""
        gens = self.generators
        if len(gens) < 2 or len(self.relators) != len(gens) * (len(gens) - 1) // 2:
            return False
        wanted = set()
        for i, a in enumerate(gens):
            for b in gens[i + 1:]:
                wanted.add(frozenset([a, b]))
        seen = set()
        for r in self.relators:
            letters = set(g for g, _ in r)
            if len(r) != 4 or len(letters) != 2:
                return False
            if any(sum(e for g, e in r if g == x) != 0 for x in letters):
                return False
            # a b a^-1 b^-1 up to rotation and inversion
            if any(r[k][0] == r[(k + 1) % 4][0] for k in range(4)):
                return False
            seen.add(frozenset(letters))
        return seen == wanted


def simplify_presentation(pres: Pi1Presentation) -> ReducedPresentation:
    relators: Dict[int, GenWord] = {}
    for k, r in enumerate(pres.relations):
        r = cyclic_reduce(r)
        if r:
            relators[k] = r
    occurs: Dict[int, set] = {g: set() for g in range(len(pres.generators))}
    for k, r in relators.items():
        for g, _ in r:
            occurs[g].add(k)
    alive = set(range(len(pres.generators)))
    substitution: Dict[int, GenWord] = {}

    heap = [(len(r), k) for k, r in relators.items()]
    heapq.heapify(heap)
    while heap:
        length, k = heapq.heappop(heap)
        word = relators.get(k)
        if word is None or len(word) != length:
            continue
        counts = Counter(g for g, _ in word)
        once = sorted(g for g, c in counts.items() if c == 1)
        if not once:
            continue
        x = once[0]
        pos = next(i for i, (g, _) in enumerate(word) if g == x)
        e = word[pos][1]
        rest = word[pos + 1:] + word[:pos]
        solution = invert_word(rest) if e > 0 else rest
        solution = free_reduce(solution)

        del relators[k]
        for g, _ in word:
            occurs[g].discard(k)
        alive.discard(x)
        for g in list(substitution):
            if any(h == x for h, _ in substitution[g]):
                substitution[g] = _substitute(substitution[g], x, solution)
        substitution[x] = solution

        for other in sorted(occurs[x]):
            old = relators[other]
            new = cyclic_reduce(_substitute(old, x, solution))
            for g, _ in old:
                occurs[g].discard(other)
            if new:
                relators[other] = new
                for g, _ in new:
                    occurs[g].add(other)
                heapq.heappush(heap, (len(new), other))
            else:
                del relators[other]
        occurs[x] = set()

    reduced = ReducedPresentation(
        generators=tuple(sorted(alive)),
        relators=tuple(relators[k] for k in sorted(relators)),
        substitution=substitution,
    )
    logger.debug(f"Tietze reduction: {len(pres.generators)} -> {len(reduced.generators)} generators, "
                 f"{len(reduced.relators)} relators left")
    return reduced


def _substitute(word: GenWord, x: int, solution: GenWord) -> GenWord:
    out = []
    inverse = invert_word(solution)
    for g, e in word:
        if g == x:
            out.extend(solution if e > 0 else inverse)
        else:
            out.append((g, e))
    return free_reduce(out)


def abelianization(pres: Pi1Presentation, reduced: Optional[ReducedPresentation] = None) -> Tuple[int, List[int]]:
    """(rank, torsion invariants) of the abelianized group."""
    reduced = reduced or simplify_presentation(pres)
    gens = reduced.generators
    matrix = np.array([exponent_vector(r, gens) for r in reduced.relators], dtype=object).reshape(
        len(reduced.relators), len(gens))
    return abelian_invariants(matrix, len(gens))


# --- homotopy engine -------------------------------------------------------------

class HomotopyEngine:
    """Normal forms and homotopy decisions for paths in one poset."""

    def __init__(self, poset: Poset, basepoint: Optional[Region] = None, skeleton: str = "nerve"):
        self.poset = poset
        self.basepoint = basepoint or poset.regions[0]
        self.presentation = pi1_presentation(poset, self.basepoint, skeleton)
        self.reduced = simplify_presentation(self.presentation)
        logger.debug(f"HomotopyEngine initialized for {poset.name} at {self.basepoint}")

    def canonical_word(self, path: Path) -> GenWord:
        word = self.reduced.rewrite(path_word(self.presentation, path))
        if self.reduced.is_free_abelian:
            vec = exponent_vector(word, self.reduced.generators)
            word = tuple((g, 1 if k > 0 else -1)
                         for g, k in zip(self.reduced.generators, vec) for _ in range(abs(k)))
        return word

    @property
    def decisive(self) -> bool:
        """Whether canonical words decide homotopy (free or free abelian reduced group)."""
        return self.reduced.is_free or self.reduced.is_free_abelian

    def normal_form(self, path: Path) -> Path:
        """Tree-gauge normal form: back to the basepoint, a canonical loop, out along the tree."""
        pres = self.presentation
        word = self.canonical_word(path)
        back = Path.from_letters(tuple((b, -o) for b, o in reversed(pres.tree_paths[path.source])),
                                 source=path.source)
        out = Path.from_letters(pres.tree_paths[path.target], source=pres.basepoint)
        return local_reduce(back.then(word_loop(pres, word)).then(out))

    def are_homotopic(self, p: Path, q: Path) -> Optional[bool]:
        """True/False when decidable, None when the reduced presentation is not recognised."""
        if p.source != q.source or p.target != q.target:
            return False
        wp = self.canonical_word(p.then(q.reverse()))
        if not wp:
            return True
        if self.decisive:
            return False
        return None


@lru_cache(maxsize=16)
def homotopy_engine(poset: Poset, basepoint: Optional[Region] = None, skeleton: str = "nerve") -> HomotopyEngine:
    return HomotopyEngine(poset, basepoint, skeleton)


def local_reduce(path: Path, sigma2: Optional[Sequence[Simplex2]] = None) -> Path:
    """
    Elementary moves: delete letters that stay at one region, write every letter positively,
    cancel b * b̄, and merge d0 c * d2 c into d1 c for the given triangles.
    """
    merges = {}
    for c in sigma2 or ():
        merges.setdefault((c.d2, c.d0), c.d1)
    letters = [(b if o > 0 else b.reverse()) for b, o in path.word if b.d1 != b.d0]
    changed = True
    while changed:
        changed = False
        out: List[Simplex1] = []
        for b in letters:
            if out and out[-1] == b.reverse():
                out.pop()
                changed = True
                continue
            if out and (out[-1], b) in merges:
                merged = merges[(out.pop(), b)]
                changed = True
                if merged.d1 != merged.d0:
                    out.append(merged)
                continue
            out.append(b)
        letters = out
    return Path.from_letters(((b, 1) for b in letters), source=path.source)


def reduce_path(path: Path, poset: Poset, sigma2: Optional[Sequence[Simplex2]] = None,
                basepoint: Optional[Region] = None) -> Path:
    """Local rewriting followed by the tree-gauge normal form."""
    for r in path.regions():
        if r not in poset:
            raise PathError(f"path leaves {poset.name} at {r}", witness=r)
    path = local_reduce(path, sigma2)
    engine = homotopy_engine(poset, basepoint)
    return engine.normal_form(path)


def are_homotopic(p: Path, q: Path, poset: Poset) -> Optional[bool]:
    return homotopy_engine(poset).are_homotopic(p, q)


def random_deformation(path: Path, poset: Poset, rng: np.random.Generator, moves: int = 6) -> Path:
    """A path homotopic to ``path``, obtained by random elementary moves."""
    letters = list(path.word)
    for _ in range(moves):
        kind = int(rng.integers(4))
        pos = int(rng.integers(len(letters) + 1))
        here = path.source if pos == 0 else letter_target(letters[pos - 1])
        if kind == 0:
            support = _pick(rng, poset.above(here))
            other = _pick(rng, poset.below(support))
            b = Simplex1(here, other, support)
            letters[pos:pos] = [(b, 1), (b, -1)]
        elif kind == 1:
            support = _pick(rng, poset.above(here))
            letters.insert(pos, (Simplex1(here, here, support), 1))
        elif kind == 2 and letters:
            k = min(pos, len(letters) - 1)
            b, o = letters[k]
            x, w = letter_source((b, o)), letter_target((b, o))
            middle = _pick(rng, poset.below(b.support))
            letters[k:k + 1] = [(Simplex1(x, middle, b.support), 1), (Simplex1(middle, w, b.support), 1)]
        elif letters:
            k = min(pos, len(letters) - 1)
            b, o = letters[k]
            letters[k] = (b.reverse(), -o)
    return Path.from_letters(letters, source=path.source)


def _pick(rng: np.random.Generator, items: Sequence):
    return items[int(rng.integers(len(items)))]


def iter_loops(poset: Poset, base: Region, max_len: int) -> Iterator[Path]:
    """Every loop at ``base`` of at most ``max_len`` non-degenerate positive letters."""
    outgoing: Dict[Region, List[Simplex1]] = {r: [] for r in poset.regions}
    for b in enumerate_simplices(poset, 1):
        if not b.is_degenerate:
            outgoing[b.d1].append(b)

    def extend(current: Region, letters: List[Letter]):
        if current == base:
            yield Path.from_letters(letters, source=base)
        if len(letters) == max_len:
            return
        for b in outgoing[current]:
            letters.append((b, 1))
            yield from extend(b.d0, letters)
            letters.pop()

    yield from extend(base, [])


# --- homomorphisms out of π₁ -------------------------------------------------------

class HolonomyMorphism:
    """
    A homomorphism from π₁ to a group, given on the generators of a presentation.

    Images are matrices, group-element indices, or both. Paths are evaluated
    in the tree gauge: tree letters map to the identity, so loops at any
    region are handled and non-loop paths get their gauge-fixed value.
    """

    def __init__(self, presentation: Pi1Presentation, images: Optional[Sequence[np.ndarray]] = None,
                 group=None, indices: Optional[Sequence[int]] = None, dim: Optional[int] = None):
        if images is None and indices is None:
            raise ValueError("a holonomy morphism needs matrices or group indices")
        if indices is not None and group is None:
            raise ValueError("group indices need a group")
        self.presentation = presentation
        self.group = group
        self._dim = dim
        self.indices = None if indices is None else tuple(int(i) for i in indices)
        if images is None and group is not None and group.elements is not None:
            images = [group.elements[i] for i in self.indices]
        self.images = None if images is None else [np.asarray(m, dtype=complex) for m in images]
        n = presentation.rank
        if (self.images is not None and len(self.images) != n) or (self.indices is not None and len(self.indices) != n):
            raise ValueError(f"expected {n} generator images")

    @property
    def dim(self) -> int:
        if self._dim is not None:
            return self._dim
        if self.images:
            return self.images[0].shape[0]
        if self.group is not None and self.group.elements is not None:
            return self.group.dim
        return 1

    def evaluate_word(self, word: GenWord) -> np.ndarray:
        if self.images is None:
            raise ValueError("this morphism has no matrix images")
        factors = (self.images[g] if e > 0 else self.images[g].conj().T for g, e in word)
        return ordered_product(factors, self.dim)

    def evaluate_word_index(self, word: GenWord) -> int:
        if self.indices is None:
            raise ValueError("this morphism has no group-index images")
        g = self.group
        acc = g.identity_index
        for k, e in word:
            img = self.indices[k] if e > 0 else g.inverse(self.indices[k])
            acc = g.mul(img, acc)
        return acc

    def evaluate(self, path: Path) -> np.ndarray:
        return self.evaluate_word(path_word(self.presentation, path))

    def evaluate_index(self, path: Path) -> int:
        return self.evaluate_word_index(path_word(self.presentation, path))

    def is_trivial(self, tol: float = DEFAULT_TOLERANCE) -> bool:
        if self.indices is not None:
            return all(i == self.group.identity_index for i in self.indices)
        eye = np.eye(self.dim)
        return all(distance(m, eye) < tol for m in self.images)

    def conjugated(self, v: np.ndarray) -> "HolonomyMorphism":
        return HolonomyMorphism(self.presentation, [v @ m @ v.conj().T for m in self.images], dim=self.dim)

    def check_relations(self, tol: float = DEFAULT_TOLERANCE):
        """Raise RelationViolation naming the first 2-cell whose relator is not sent to 1."""
        pres = self.presentation
        for word, witness in zip(pres.relations, pres.witnesses):
            if self.indices is not None:
                if self.evaluate_word_index(word) != self.group.identity_index:
                    raise RelationViolation(f"relation over {_describe(witness)} is violated", witness=witness)
            else:
                defect = distance(self.evaluate_word(word), np.eye(self.dim))
                if defect >= tol:
                    raise RelationViolation(f"relation over {_describe(witness)} is violated (defect {defect:.3e})",
                                            witness=witness)

    def __repr__(self) -> str:
        return f"HolonomyMorphism(generators={self.presentation.rank}, dim={self.dim})"


def _describe(witness) -> str:
    if isinstance(witness, tuple):
        return " < ".join(str(r) for r in witness)
    return str(witness)


def evaluate_hom(pres: Pi1Presentation, images: Union[Mapping, Sequence], group=None,
                 tol: float = DEFAULT_TOLERANCE) -> HolonomyMorphism:
    """
    Build the homomorphism with the given generator images, checking every relation.

    ``images`` is a sequence in generator order or a mapping keyed by generator
    simplex or index. With ``group`` the images are element indices and the
    check is exact; without it they are matrices compared within ``tol``.
    """
    if isinstance(images, Mapping):
        ordered = []
        for k, g in enumerate(pres.generators):
            if g in images:
                ordered.append(images[g])
            elif k in images:
                ordered.append(images[k])
            else:
                raise ValueError(f"no image for generator {g}")
        images = ordered
    if group is not None:
        hom = HolonomyMorphism(pres, group=group, indices=list(images))
    else:
        hom = HolonomyMorphism(pres, images=list(images))
    hom.check_relations(tol)
    return hom


def trivial_hom(pres: Pi1Presentation, dim: int = 1) -> HolonomyMorphism:
    return HolonomyMorphism(pres, [np.eye(dim, dtype=complex) for _ in pres.generators], dim=dim)


# --- circles ---------------------------------------------------------------------

def standard_loop(poset: Poset) -> Path:
    """
    The loop once around a circle-type base in the direction of increasing sites.

    Arcs: a_s+1 -> a_{s+1}+1 inside a_s+2 for every s. Minimal circle: w -> e
    inside n, then back inside s.
    """
    if poset.kind != "circle":
        raise PathError(f"{poset.name} is not a circle base")
    by_payload = {r.payload: r for r in poset.regions}
    if ("cell", "w") in by_payload:
        w, e, n, s = (by_payload[("cell", x)] for x in ("w", "e", "n", "s"))
        return Path.from_letters([(Simplex1(w, e, n), 1), (Simplex1(e, w, s), 1)])
    m = sum(1 for r in poset.regions if r.payload[2] == 1)
    if ("arc", 0, 2) not in by_payload:
        raise PathError(f"{poset.name} has no arcs of length 2 to walk around with")
    letters = []
    for s in range(m):
        lo, hi = by_payload[("arc", s, 1)], by_payload[("arc", (s + 1) % m, 1)]
        letters.append((Simplex1(lo, hi, by_payload[("arc", s, 2)]), 1))
    return Path.from_letters(letters)


def edge_windings(engine: HomotopyEngine, reference: Optional[Path] = None) -> Dict[Simplex1, int]:
    """
    Winding number of every 1-cell when π₁ is infinite cyclic.

    The sign is fixed so that ``reference`` (default: the standard loop of a
    circle base) winds +1.
    """
    reduced = engine.reduced
    if len(reduced.generators) != 1 or reduced.relators:
        raise PathError(f"π₁ of {engine.poset.name} is not presented as infinite cyclic")
    pres = engine.presentation
    reference = reference or standard_loop(engine.poset)
    k = sum(e for _, e in engine.canonical_word(reference))
    if abs(k) != 1:
        raise PathError(f"reference loop winds {k} times, expected +-1")
    windings = {}
    for edge in pres.edges:
        g = pres.generator_index.get(edge)
        windings[edge] = 0 if g is None else k * sum(e for _, e in reduced.rewrite(((g, 1),)))
    return windings


def letter_winding(pres: Pi1Presentation, windings: Dict[Simplex1, int], letter: Letter) -> int:
    return sum(o * windings[b] for b, o in edge_letters(pres, letter))


def path_winding(pres: Pi1Presentation, windings: Dict[Simplex1, int], path: Path) -> int:
    return sum(letter_winding(pres, windings, x) for x in path.word)
