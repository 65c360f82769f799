# src/hnets/topology/poset_core.py

import logging
from functools import cached_property
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from hnets.exceptions import PosetError
from hnets.models import Region

logger = logging.getLogger(__name__)

KINDS = ("circle", "product", "minkowski2d", "custom")


class Poset:
    """
    Finite poset of regions with a causal disjointness relation.

    ``leq[i, j]`` is True when regions[i] <= regions[j]; ``perp`` is symmetric.
    Instances are treated as immutable once built.
    """

    def __init__(self, name: str, regions: Sequence[Region], leq: np.ndarray, perp: np.ndarray,
                 kind: str = "custom"):
        if kind not in KINDS:
            raise PosetError(f"unknown poset kind {kind!r}")
        order = sorted(range(len(regions)), key=lambda k: regions[k].id)
        self.name = name
        self.kind = kind
        self.regions: Tuple[Region, ...] = tuple(regions[k] for k in order)
        self._leq = np.asarray(leq, dtype=bool)[np.ix_(order, order)]
        self._perp = np.asarray(perp, dtype=bool)[np.ix_(order, order)]
        self._index: Dict[int, int] = {}
        for i, r in enumerate(self.regions):
            if r.id in self._index:
                raise PosetError(f"duplicate region id {r.id}", witness=r)
            self._index[r.id] = i
        logger.debug(f"Poset {name!r} ({kind}) with {len(self.regions)} regions")

    # --- lookup ---------------------------------------------------------------

    def __len__(self) -> int:
        return len(self.regions)

    def __iter__(self) -> Iterator[Region]:
        return iter(self.regions)

    def __contains__(self, region) -> bool:
        return isinstance(region, Region) and region.id in self._index

    def __repr__(self) -> str:
        return f"Poset({self.name!r}, kind={self.kind!r}, regions={len(self.regions)})"

    def index(self, region: Region) -> int:
        try:
            return self._index[region.id]
        except KeyError:
            raise PosetError(f"region {region} is not in poset {self.name!r}", witness=region) from None

    def region(self, region_id: int) -> Region:
        try:
            return self.regions[self._index[region_id]]
        except KeyError:
            raise PosetError(f"no region with id {region_id} in poset {self.name!r}", witness=region_id) from None

    @property
    def leq_matrix(self) -> np.ndarray:
        return self._leq.copy()

    @property
    def perp_matrix(self) -> np.ndarray:
        return self._perp.copy()

    # --- relations ------------------------------------------------------------

    def leq(self, a: Region, b: Region) -> bool:
        return bool(self._leq[self.index(a), self.index(b)])

    def lt(self, a: Region, b: Region) -> bool:
        return a != b and self.leq(a, b)

    def perp(self, a: Region, b: Region) -> bool:
        return bool(self._perp[self.index(a), self.index(b)])

    def below(self, a: Region) -> List[Region]:
        """All e <= a, in id order."""
        column = self._leq[:, self.index(a)]
        return [self.regions[i] for i in np.flatnonzero(column)]

    def above(self, a: Region) -> List[Region]:
        row = self._leq[self.index(a), :]
        return [self.regions[i] for i in np.flatnonzero(row)]

    def strictly_below(self, a: Region) -> List[Region]:
        """The local poset Δᵃ: proper sub-regions of a."""
        return [e for e in self.below(a) if e != a]

    def common_upper_bounds(self, a: Region, b: Region) -> List[Region]:
        both = self._leq[self.index(a), :] & self._leq[self.index(b), :]
        return [self.regions[i] for i in np.flatnonzero(both)]

    def strict_pairs(self) -> List[Tuple[Region, Region]]:
        """All (lo, hi) with lo < hi, in id order."""
        rows, cols = np.nonzero(self._leq & ~np.eye(len(self), dtype=bool))
        return [(self.regions[i], self.regions[j]) for i, j in zip(rows, cols)]

    def chains3(self) -> List[Tuple[Region, Region, Region]]:
        """All strict chains lo < mid < hi."""
        strict = self._leq & ~np.eye(len(self), dtype=bool)
        chains = []
        for i, j in zip(*np.nonzero(strict)):
            for k in np.flatnonzero(strict[j, :]):
                chains.append((self.regions[i], self.regions[j], self.regions[k]))
        return chains

    @cached_property
    def covers(self) -> List[Tuple[Region, Region]]:
        """Covering pairs (Hasse edges) lo < hi with nothing strictly between."""
        reduced = nx.transitive_reduction(self.order_graph())
        return sorted(((self.region(u), self.region(v)) for u, v in reduced.edges),
                      key=lambda pair: (pair[0].id, pair[1].id))

    def minimal(self) -> List[Region]:
        return [r for r in self.regions if len(self.below(r)) == 1]

    def maximal(self) -> List[Region]:
        return [r for r in self.regions if len(self.above(r)) == 1]

    # --- graphs and global properties -------------------------------------------

    def order_graph(self) -> nx.DiGraph:
        """Strict order as a DAG on region ids."""
        g = nx.DiGraph()
        g.add_nodes_from(r.id for r in self.regions)
        g.add_edges_from((lo.id, hi.id) for lo, hi in self.strict_pairs())
        return g

    def comparability_graph(self) -> nx.Graph:
        """Undirected graph of strict pairs; same components as the 1-simplex graph."""
        return self.order_graph().to_undirected()

    def components(self) -> List[List[Region]]:
        comps = nx.connected_components(self.comparability_graph())
        return sorted(([self.region(i) for i in sorted(c)] for c in comps), key=lambda c: c[0].id)

    def is_connected(self) -> bool:
        return len(self.regions) > 0 and nx.is_connected(self.comparability_graph())

    def is_directed(self) -> bool:
        leq = self._leq.astype(np.int64)
        return bool(np.all(leq @ leq.T > 0))

    def subposet(self, regions: Iterable[Region], name: Optional[str] = None) -> "Poset":
        chosen = sorted({self.index(r) for r in regions})
        sub = [self.regions[i] for i in chosen]
        return Poset(name or f"{self.name}|{len(sub)}", sub,
                     self._leq[np.ix_(chosen, chosen)], self._perp[np.ix_(chosen, chosen)],
                     kind="custom")

    def local_poset(self, a: Region) -> "Poset":
        """Δᵃ as a poset in its own right."""
        lower = self.strictly_below(a)
        if not lower:
            raise PosetError(f"region {a} has no proper sub-regions", witness=a)
        return self.subposet(lower, name=f"{self.name}/Δ{a}")

    def verify(self) -> List[str]:
        """Exhaustive check of the order and disjointness axioms; returns the problems found."""
        problems = []
        leq, perp = self._leq, self._perp
        n = len(self)
        if not np.all(np.diag(leq)):
            problems.append("leq is not reflexive")
        if np.any(leq & leq.T & ~np.eye(n, dtype=bool)):
            problems.append("leq is not antisymmetric")
        composed = (leq.astype(np.int64) @ leq.astype(np.int64)) > 0
        if np.any(composed & ~leq):
            problems.append("leq is not transitive")
        if np.any(perp != perp.T):
            problems.append("perp is not symmetric")
        if np.any(np.diag(perp)):
            problems.append("perp is not irreflexive")
        closed = (leq.astype(np.int64) @ perp.astype(np.int64) @ leq.T.astype(np.int64)) > 0
        if np.any(closed & ~perp):
            problems.append("perp is not isotone")
        for p in problems:
            logger.warning(f"Poset {self.name!r}: {p}")
        return problems


def build_circle_base(m: int, max_len: int) -> Poset:
    """
    Open arcs on a circle of m points, of lengths 1..max_len.

    The arc (s, l) covers the unit arcs s, ..., s+l-1 and its closure the points
    s, ..., s+l (mod m). Order is containment, perp is disjointness of closures.
    """
    if m < 3:
        raise PosetError(f"circle base needs at least 3 points, got m={m}")
    if not 1 <= max_len <= m - 2:
        raise PosetError(f"max_len must satisfy 1 <= max_len <= m-2 for proper closures, got {max_len} with m={m}")

    regions, sites, closures = [], [], []
    for length in range(1, max_len + 1):
        for start in range(m):
            regions.append(Region(len(regions), ("arc", start, length), f"a{start}+{length}"))
            sites.append(frozenset((start + k) % m for k in range(length)))
            closures.append(frozenset((start + k) % m for k in range(length + 1)))
    n = len(regions)
    leq = np.array([[sites[i] <= sites[j] for j in range(n)] for i in range(n)], dtype=bool)
    perp = np.array([[not (closures[i] & closures[j]) for j in range(n)] for i in range(n)], dtype=bool)
    logger.info(f"Built circle base m={m}, max_len={max_len}: {n} regions")
    return Poset(f"circle({m},{max_len})", regions, leq, perp, kind="circle")


def build_minimal_circle_base() -> Poset:
    """
    Smallest poset with the homotopy type of a circle: two arcs n, s whose
    overlap has the two components w, e.
    """
    names = ["w", "e", "n", "s"]
    regions = [Region(i, ("cell", name), name) for i, name in enumerate(names)]
    leq = np.eye(4, dtype=bool)
    for lo in (0, 1):
        for hi in (2, 3):
            leq[lo, hi] = True
    perp = np.zeros((4, 4), dtype=bool)
    perp[0, 1] = perp[1, 0] = True
    return Poset("circle(min)", regions, leq, perp, kind="circle")


def build_product_base(p: Poset, q: Poset) -> Poset:
    """Componentwise order; (a,b) ⊥ (a',b') iff a ⊥ a' or b ⊥ b'."""
    if not len(p) or not len(q):
        raise PosetError("product of an empty poset")
    regions = [
        Region(i * len(q) + j, ("product", a.id, b.id), f"{a}x{b}")
        for i, a in enumerate(p.regions) for j, b in enumerate(q.regions)
    ]
    leq = np.kron(p.leq_matrix.astype(np.int8), q.leq_matrix.astype(np.int8)).astype(bool)
    ones_p = np.ones((len(p), len(p)), dtype=np.int8)
    ones_q = np.ones((len(q), len(q)), dtype=np.int8)
    perp = (np.kron(p.perp_matrix.astype(np.int8), ones_q) + np.kron(ones_p, q.perp_matrix.astype(np.int8))) > 0
    logger.info(f"Built product base {p.name} x {q.name}: {len(regions)} regions")
    return Poset(f"{p.name}x{q.name}", regions, leq, perp, kind="product")


def build_minkowski2d_base(nx_sites: int, nt_sites: int, max_size: int) -> Poset:
    """
    Double cones on a 1+1 light-cone grid.

    A cone is the rectangle [u0, u1] x [v0, v1] in null coordinates with
    0 <= u0 < u1 <= nx_sites, 0 <= v0 < v1 <= nt_sites and both sides at most
    ``max_size``. Closed cones are causally disjoint when one lies strictly to
    the right of the other along u and strictly to the left along v.
    """
    if nx_sites < 2 or nt_sites < 2:
        raise PosetError(f"minkowski grid needs nx, nt >= 2, got {nx_sites}, {nt_sites}")
    if max_size < 1:
        raise PosetError(f"max_size must be positive, got {max_size}")

    boxes = []
    for u0 in range(nx_sites):
        for u1 in range(u0 + 1, min(nx_sites, u0 + max_size) + 1):
            for v0 in range(nt_sites):
                for v1 in range(v0 + 1, min(nt_sites, v0 + max_size) + 1):
                    boxes.append((u0, u1, v0, v1))
    regions = [Region(i, ("cone",) + box, f"c{box[0]}{box[1]}{box[2]}{box[3]}") for i, box in enumerate(boxes)]
    b = np.array(boxes)
    u0, u1, v0, v1 = (b[:, k] for k in range(4))
    leq = ((u0[None, :] <= u0[:, None]) & (u1[:, None] <= u1[None, :])
           & (v0[None, :] <= v0[:, None]) & (v1[:, None] <= v1[None, :]))
    right = (u1[:, None] < u0[None, :]) & (v1[None, :] < v0[:, None])
    perp = right | right.T
    logger.info(f"Built minkowski2d base {nx_sites}x{nt_sites} (max_size={max_size}): {len(regions)} regions")
    return Poset(f"minkowski2d({nx_sites},{nt_sites},{max_size})", regions, leq, perp, kind="minkowski2d")


def build_custom(name: str, region_ids: Sequence[int], leq_pairs: Iterable[Tuple[int, int]],
                 perp_pairs: Iterable[Tuple[int, int]] = (), labels: Optional[Dict[int, str]] = None) -> Poset:
    """
    Poset from generating pairs: transitive closure of ``leq_pairs``,
    symmetric and isotone closure of ``perp_pairs``.
    """
    labels = labels or {}
    ids = sorted(set(region_ids))
    position = {rid: k for k, rid in enumerate(ids)}
    g = nx.DiGraph()
    g.add_nodes_from(ids)
    for lo, hi in leq_pairs:
        if lo not in position or hi not in position:
            raise PosetError(f"leq pair ({lo}, {hi}) names an unknown region", witness=(lo, hi))
        g.add_edge(lo, hi)
    if not nx.is_directed_acyclic_graph(nx.DiGraph((u, v) for u, v in g.edges if u != v)):
        raise PosetError(f"leq pairs of {name!r} contain a cycle")
    closure = nx.transitive_closure(g, reflexive=True)

    n = len(ids)
    leq = np.zeros((n, n), dtype=bool)
    for u, v in closure.edges:
        leq[position[u], position[v]] = True
    perp = np.zeros((n, n), dtype=bool)
    for a, b in perp_pairs:
        if a not in position or b not in position:
            raise PosetError(f"perp pair ({a}, {b}) names an unknown region", witness=(a, b))
        perp[position[a], position[b]] = perp[position[b], position[a]] = True
    li = leq.astype(np.int64)
    perp = (li @ perp.astype(np.int64) @ li.T) > 0
    if np.any(np.diag(perp)):
        bad = ids[int(np.flatnonzero(np.diag(perp))[0])]
        raise PosetError(f"perp closure makes region {bad} disjoint from itself", witness=bad)

    regions = [Region(rid, ("custom",), labels.get(rid, "")) for rid in ids]
    return Poset(name, regions, leq, perp, kind="custom")
