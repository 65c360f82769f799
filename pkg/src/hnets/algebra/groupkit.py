# src/hnets/algebra/groupkit.py

import itertools
import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from hnets.exceptions import GroupError, NotNormalError
from hnets.utils.calculations import DEFAULT_TOLERANCE, MatrixValidator, distance, matrix_key

logger = logging.getLogger(__name__)

EXHAUSTIVE_ASSOCIATIVITY = 64
MAX_CLOSURE_ORDER = 4096


class FiniteGroup:
    """
    Finite group identified by a Cayley table on element indices.

    ``table[i, j]`` is the index of e_i e_j. ``elements`` optionally attaches a
    unitary matrix to every index; abstract groups (quotients) have none.
    """

    def __init__(self, name: str, table: np.ndarray, elements: Optional[Sequence[np.ndarray]] = None,
                 labels: Optional[Sequence[str]] = None):
        table = np.asarray(table, dtype=np.int64)
        n = table.shape[0]
        if table.shape != (n, n) or n == 0:
            raise GroupError(f"Cayley table of {name!r} must be a non-empty square array, got {table.shape}")
        if table.min() < 0 or table.max() >= n:
            raise GroupError(f"Cayley table of {name!r} has entries outside 0..{n - 1}")
        self.name = name
        self.table = table
        self.elements = None if elements is None else [np.asarray(m, dtype=complex) for m in elements]
        if self.elements is not None and len(self.elements) != n:
            raise GroupError(f"{name!r}: {len(self.elements)} matrices for a table of order {n}")
        self.labels = list(labels) if labels is not None else [f"g{i}" for i in range(n)]

        rows = np.flatnonzero(np.all(table == np.arange(n)[None, :], axis=1))
        if rows.size != 1:
            raise GroupError(f"{name!r} has no unique identity element")
        self.identity_index = int(rows[0])
        self._inverse = np.full(n, -1, dtype=np.int64)
        for i in range(n):
            hits = np.flatnonzero(table[i, :] == self.identity_index)
            if hits.size != 1:
                raise GroupError(f"element {self.labels[i]} of {name!r} has no unique inverse", witness=i)
            self._inverse[i] = hits[0]
        self._keys: Dict[bytes, int] = {}
        if self.elements is not None:
            self._keys = {matrix_key(m): i for i, m in enumerate(self.elements)}
        logger.debug(f"FiniteGroup {name!r} of order {n}")

    # --- construction -----------------------------------------------------------

    @classmethod
    def generated_by(cls, name: str, generators: Sequence[np.ndarray], tol: float = DEFAULT_TOLERANCE,
                     labels: Optional[Dict[int, str]] = None) -> "FiniteGroup":
        """Close a set of unitary matrices under multiplication (breadth first)."""
        if not generators:
            raise GroupError(f"{name!r}: at least one generator is required")
        gens = [np.asarray(g, dtype=complex) for g in generators]
        for k, g in enumerate(gens):
            if not MatrixValidator.validate_unitary(g, tol):
                raise GroupError(f"generator {k} of {name!r} is not unitary", witness=k)
        dim = gens[0].shape[0]
        elements = [np.eye(dim, dtype=complex)]
        keys = {matrix_key(elements[0]): 0}
        head = 0
        while head < len(elements):
            current = elements[head]
            head += 1
            for g in gens:
                product = g @ current
                key = matrix_key(product)
                if key not in keys:
                    keys[key] = len(elements)
                    elements.append(product)
                    if len(elements) > MAX_CLOSURE_ORDER:
                        raise GroupError(f"{name!r} is larger than {MAX_CLOSURE_ORDER} elements")
        n = len(elements)
        table = np.empty((n, n), dtype=np.int64)
        for i, a in enumerate(elements):
            for j, b in enumerate(elements):
                try:
                    table[i, j] = keys[matrix_key(a @ b)]
                except KeyError:
                    raise GroupError(f"{name!r} is not closed within tolerance", witness=(i, j)) from None
        names = [(labels or {}).get(i, f"g{i}") for i in range(n)]
        logger.info(f"Generated group {name!r}: order {n} in U({dim})")
        return cls(name, table, elements, names)

    # --- arithmetic -------------------------------------------------------------

    @property
    def order(self) -> int:
        return self.table.shape[0]

    def __len__(self) -> int:
        return self.order

    @property
    def dim(self) -> int:
        if self.elements is None:
            raise GroupError(f"{self.name!r} is abstract and has no matrix dimension")
        return self.elements[0].shape[0]

    def mul(self, i: int, j: int) -> int:
        return int(self.table[i, j])

    def inverse(self, i: int) -> int:
        return int(self._inverse[i])

    def product(self, indices: Iterable[int]) -> int:
        """Left-to-right product e_{i1} e_{i2} ..."""
        acc = self.identity_index
        for i in indices:
            acc = self.mul(acc, i)
        return acc

    def power(self, i: int, k: int) -> int:
        base = i if k >= 0 else self.inverse(i)
        acc = self.identity_index
        for _ in range(abs(k)):
            acc = self.mul(acc, base)
        return acc

    def conjugate(self, g: int, h: int) -> int:
        """g h g^-1."""
        return self.mul(self.mul(g, h), self.inverse(g))

    def element_order(self, i: int) -> int:
        k, acc = 1, i
        while acc != self.identity_index:
            acc = self.mul(acc, i)
            k += 1
        return k

    def index_of(self, m: np.ndarray, tol: float = DEFAULT_TOLERANCE) -> int:
        if self.elements is None:
            raise GroupError(f"{self.name!r} is abstract; matrices cannot be looked up")
        i = self._keys.get(matrix_key(m))
        if i is None:
            # fall back to a tolerance scan for matrices sitting on a rounding boundary
            for k, e in enumerate(self.elements):
                if distance(e, m) < tol:
                    return k
            raise GroupError(f"matrix is not an element of {self.name!r}")
        return i

    def matrix(self, i: int) -> np.ndarray:
        if self.elements is None:
            raise GroupError(f"{self.name!r} is abstract and has no matrices")
        return self.elements[i]

    def label(self, i: int) -> str:
        return self.labels[i]

    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.table, self.table.T))

    def center(self) -> List[int]:
        return [i for i in range(self.order) if np.array_equal(self.table[i, :], self.table[:, i])]

    def subgroup_closure(self, indices: Iterable[int]) -> List[int]:
        members = {self.identity_index}
        frontier = list(set(indices))
        gens = list(frontier)
        members.update(frontier)
        while frontier:
            new = []
            for a in frontier:
                for g in gens:
                    c = self.mul(a, g)
                    if c not in members:
                        members.add(c)
                        new.append(c)
            frontier = new
        return sorted(members)

    def is_subgroup(self, indices: Iterable[int]) -> bool:
        s = set(indices)
        return self.identity_index in s and all(self.mul(a, b) in s for a in s for b in s)

    def subgroup(self, indices: Sequence[int], name: Optional[str] = None) -> Tuple["FiniteGroup", List[int]]:
        """The subgroup on ``indices`` re-indexed from 0, plus the embedding list."""
        members = sorted(set(indices))
        if not self.is_subgroup(members):
            raise GroupError(f"indices do not form a subgroup of {self.name!r}")
        position = {g: k for k, g in enumerate(members)}
        table = np.array([[position[self.mul(a, b)] for b in members] for a in members], dtype=np.int64)
        elements = None if self.elements is None else [self.elements[g] for g in members]
        sub = FiniteGroup(name or f"{self.name}-sub{len(members)}", table, elements,
                          [self.labels[g] for g in members])
        return sub, members

    # --- validation -------------------------------------------------------------

    def verify(self, tol: float = DEFAULT_TOLERANCE, rng: Optional[np.random.Generator] = None,
               samples: int = 20000) -> List[str]:
        """Group axioms on the table plus consistency of the attached matrices."""
        problems = []
        n = self.order
        t = self.table
        if n <= EXHAUSTIVE_ASSOCIATIVITY:
            lhs = t[t[:, :, None], np.arange(n)[None, None, :]]
            rhs = t[np.arange(n)[:, None, None], t[None, :, :]]
            if not np.array_equal(lhs, rhs):
                bad = np.argwhere(lhs != rhs)[0]
                problems.append(f"table is not associative at {tuple(int(x) for x in bad)}")
        else:
            rng = rng or np.random.default_rng(0)
            triples = rng.integers(n, size=(samples, 3))
            for a, b, c in triples:
                if t[t[a, b], c] != t[a, t[b, c]]:
                    problems.append(f"table is not associative at {(int(a), int(b), int(c))}")
                    break
        if self.elements is not None:
            for i, m in enumerate(self.elements):
                if not MatrixValidator.validate_unitary(m, tol):
                    problems.append(f"element {self.labels[i]} is not unitary")
                    break
            for i, j in itertools.product(range(n), repeat=2):
                if distance(self.elements[i] @ self.elements[j], self.elements[t[i, j]]) >= tol:
                    problems.append(f"table disagrees with matrix product at ({i}, {j})")
                    break
        for p in problems:
            logger.warning(f"Group {self.name!r}: {p}")
        return problems

    def __repr__(self) -> str:
        return f"FiniteGroup({self.name!r}, order={self.order})"


@dataclass
class GradedGroup:
    """A group with a central grading element gamma of order at most 2."""
    group: FiniteGroup
    gamma: int

    def __post_init__(self):
        g = self.group
        if g.mul(self.gamma, self.gamma) != g.identity_index:
            raise GroupError(f"gamma={g.label(self.gamma)} does not square to the identity", witness=self.gamma)
        if self.gamma not in g.center():
            raise GroupError(f"gamma={g.label(self.gamma)} is not central in {g.name!r}", witness=self.gamma)

    def grading_automorphism(self) -> List[int]:
        """Conjugation by gamma as a permutation of indices (the identity, gamma being central)."""
        return [self.group.conjugate(self.gamma, h) for h in range(self.group.order)]


@dataclass
class NormalizerData:
    """An ambient group N, a normal subgroup G of it, and the quotient N/G."""
    ambient: FiniteGroup
    normal_indices: Tuple[int, ...]
    normal: FiniteGroup
    cosets: List[Tuple[int, ...]]
    coset_of: np.ndarray
    quotient_table: np.ndarray
    _quotient: Optional[FiniteGroup] = field(default=None, repr=False)

    def project(self, n: int) -> int:
        return int(self.coset_of[n])

    def representative(self, q: int) -> int:
        return self.cosets[q][0]

    def in_normal(self, n: int) -> bool:
        return self.project(n) == self.project(self.ambient.identity_index)

    def normal_to_ambient(self, g: int) -> int:
        return self.normal_indices[g]

    def ambient_to_normal(self, n: int) -> int:
        try:
            return self.normal_indices.index(n)
        except ValueError:
            raise GroupError(f"{self.ambient.label(n)} is not in the normal subgroup", witness=n) from None

    def coset_by_label(self, label: str) -> int:
        """Quotient index of the coset containing the element labelled ``label`` (brackets optional)."""
        inner = label.strip()
        if inner.startswith("[") and inner.endswith("]"):
            inner = inner[1:-1]
        try:
            n = self.ambient.labels.index(inner)
        except ValueError:
            raise GroupError(f"{self.ambient.name!r} has no element labelled {inner!r}", witness=label) from None
        return self.project(n)

    def quotient_group(self) -> FiniteGroup:
        if self._quotient is None:
            labels = ["[" + self.ambient.label(c[0]) + "]" for c in self.cosets]
            self._quotient = FiniteGroup(f"{self.ambient.name}/{self.normal.name}", self.quotient_table,
                                         labels=labels)
        return self._quotient


def normalizer_quotient(ambient: FiniteGroup,
                        normal: Union[FiniteGroup, Sequence[int], Callable[[int], bool]],
                        name: Optional[str] = None) -> NormalizerData:
    """
    Coset partition and quotient table of ambient / normal.

    ``normal`` is given as a matrix subgroup, a list of ambient indices or a
    predicate on ambient indices.
    """
    if isinstance(normal, FiniteGroup):
        indices = sorted({ambient.index_of(m) for m in normal.elements})
    elif callable(normal):
        indices = [i for i in range(ambient.order) if normal(i)]
    else:
        indices = sorted(set(int(i) for i in normal))
    if not ambient.is_subgroup(indices):
        raise GroupError(f"selected elements are not a subgroup of {ambient.name!r}")
    members = set(indices)
    for n in range(ambient.order):
        for g in indices:
            if ambient.conjugate(n, g) not in members:
                raise NotNormalError(
                    f"{ambient.label(n)} conjugates {ambient.label(g)} out of the subgroup",
                    witness=(n, g))

    coset_of = np.full(ambient.order, -1, dtype=np.int64)
    cosets: List[Tuple[int, ...]] = []
    for n in range(ambient.order):
        if coset_of[n] >= 0:
            continue
        coset = tuple(sorted(ambient.mul(n, g) for g in indices))
        for x in coset:
            coset_of[x] = len(cosets)
        cosets.append(coset)
    k = len(cosets)
    quotient_table = np.empty((k, k), dtype=np.int64)
    for a in range(k):
        for b in range(k):
            quotient_table[a, b] = coset_of[ambient.mul(cosets[a][0], cosets[b][0])]
    sub, _ = ambient.subgroup(indices, name=name or f"{ambient.name}-normal")
    logger.info(f"Quotient {ambient.name}/{sub.name}: {k} cosets of size {len(indices)}")
    return NormalizerData(ambient, tuple(indices), sub, cosets, coset_of, quotient_table)


def make_cyclic_phase_group(n: int, d: int = 1) -> FiniteGroup:
    """Scalar matrices exp(2 pi i k / n) 1_d, k = 0..n-1; index k is the k-th power."""
    if n < 1 or d < 1:
        raise GroupError(f"cyclic phase group needs n >= 1 and d >= 1, got n={n}, d={d}")
    elements = [np.exp(2j * np.pi * k / n) * np.eye(d, dtype=complex) for k in range(n)]
    table = (np.arange(n)[:, None] + np.arange(n)[None, :]) % n
    return FiniteGroup(f"Z{n}(d={d})", table, elements, [f"w^{k}" for k in range(n)])


PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def make_pauli_group() -> Tuple[GradedGroup, NormalizerData]:
    """
    The order-16 Pauli group N = <X, Z, i1> in U(2), its centre G = {±1, ±i}
    graded by gamma = -1, and the quotient N/G = Z2 x Z2.
    """
    ambient = FiniteGroup.generated_by("Pauli", [PAULI_X, PAULI_Z, 1j * np.eye(2)])
    names = {}
    for phase, pname in ((1, ""), (-1, "-"), (1j, "i"), (-1j, "-i")):
        for mat, mname in ((np.eye(2), "1"), (PAULI_X, "X"), (PAULI_Y, "Y"), (PAULI_Z, "Z")):
            names[ambient.index_of(phase * mat)] = f"{pname}{mname}"
    ambient.labels = [names[i] for i in range(ambient.order)]
    centre = ambient.center()
    data = normalizer_quotient(ambient, centre, name="Pauli-centre")
    gamma = data.ambient_to_normal(ambient.index_of(-np.eye(2)))
    graded = GradedGroup(data.normal, gamma)
    return graded, data


def make_symmetric_group(n: int) -> FiniteGroup:
    """S_n as permutation matrices; element k is the k-th permutation in lexicographic order."""
    if n < 1 or n > 6:
        raise GroupError(f"symmetric groups are supported for 1 <= n <= 6, got {n}")
    perms = list(itertools.permutations(range(n)))
    elements = []
    for perm in perms:
        m = np.zeros((n, n), dtype=complex)
        m[list(perm), list(range(n))] = 1
        elements.append(m)
    position = {p: k for k, p in enumerate(perms)}
    # (p q)(i) = p(q(i)) matches the matrix product P Q
    table = np.array([[position[tuple(p[q[i]] for i in range(n))] for q in perms] for p in perms],
                     dtype=np.int64)
    labels = ["".join(str(x) for x in p) for p in perms]
    return FiniteGroup(f"S{n}", table, elements, labels)


def make_direct_product(g: FiniteGroup, h: FiniteGroup) -> FiniteGroup:
    """g x h with block-diagonal matrices; index i * |h| + j is (g_i, h_j)."""
    ng, nh = g.order, h.order
    table = np.empty((ng * nh, ng * nh), dtype=np.int64)
    for a, b, c, d in itertools.product(range(ng), range(nh), range(ng), range(nh)):
        table[a * nh + b, c * nh + d] = g.mul(a, c) * nh + h.mul(b, d)
    elements = None
    if g.elements is not None and h.elements is not None:
        elements = []
        for a in range(ng):
            for b in range(nh):
                m = np.zeros((g.dim + h.dim, g.dim + h.dim), dtype=complex)
                m[:g.dim, :g.dim] = g.elements[a]
                m[g.dim:, g.dim:] = h.elements[b]
                elements.append(m)
    labels = [f"({g.label(a)},{h.label(b)})" for a in range(ng) for b in range(nh)]
    return FiniteGroup(f"{g.name}x{h.name}", table, elements, labels)


def automorphism_of(ambient: FiniteGroup, normal: NormalizerData, n: int) -> List[int]:
    """Conjugation by ambient element n restricted to the normal subgroup, as a permutation of its indices."""
    return [normal.ambient_to_normal(ambient.conjugate(n, g)) for g in normal.normal_indices]
