# src/hnets/topology/simplicial.py

import logging
from functools import lru_cache
from typing import Dict, Iterator, List, Tuple, Union

import networkx as nx
import numpy as np
import pandas as pd

from hnets.exceptions import DisconnectedPosetError, PosetError
from hnets.models import Path, PathFrame, Region, Simplex1, Simplex2
from hnets.topology.poset_core import Poset

logger = logging.getLogger(__name__)

Simplex = Union[Region, Simplex1, Simplex2]


def _bounds_within(p: Poset, s: Region) -> Tuple[List[Region], Dict[Tuple[int, int], List[Region]]]:
    """Regions below s and, for each ordered pair of them, their common upper bounds below s."""
    below = p.below(s)
    idx = [p.index(r) for r in below]
    leq = p.leq_matrix[np.ix_(idx, idx)]
    bounds = {}
    for i, x in enumerate(below):
        for j, y in enumerate(below):
            common = np.flatnonzero(leq[i, :] & leq[j, :])
            bounds[(x.id, y.id)] = [below[k] for k in common]
    return below, bounds


def iter_simplices1(p: Poset) -> Iterator[Simplex1]:
    for s in p.regions:
        below = p.below(s)
        for x in below:
            for y in below:
                yield Simplex1(x, y, s)


def iter_simplices2(p: Poset) -> Iterator[Simplex2]:
    """Every triangle of 1-simplices with compatible faces, grouped by support."""
    for s in p.regions:
        below, bounds = _bounds_within(p, s)
        for v0 in below:
            for v1 in below:
                for v2 in below:
                    for s2 in bounds[(v0.id, v1.id)]:
                        d2 = Simplex1(v0, v1, s2)
                        for s0 in bounds[(v1.id, v2.id)]:
                            d0 = Simplex1(v1, v2, s0)
                            for s1 in bounds[(v0.id, v2.id)]:
                                yield Simplex2(d0=d0, d2=d2, d1=Simplex1(v0, v2, s1), support=s)


@lru_cache(maxsize=32)
def _cached_simplices(p: Poset, degree: int) -> Tuple:
    if degree == 0:
        return tuple(p.regions)
    if degree == 1:
        return tuple(sorted(iter_simplices1(p), key=lambda b: b.key))
    return tuple(sorted(iter_simplices2(p), key=lambda c: c.key))


def enumerate_simplices(p: Poset, degree: int) -> List[Simplex]:
    """
    Simplices of the given degree (0, 1 or 2), degenerate ones included,
    in lexicographic order of region ids.
    """
    if degree not in (0, 1, 2):
        raise PosetError(f"simplices are only enumerated up to degree 2, got {degree}")
    simplices = list(_cached_simplices(p, degree))
    logger.debug(f"Enumerated {len(simplices)} simplices of degree {degree} in {p.name}")
    return simplices


def check_simplex1(p: Poset, b: Simplex1) -> List[str]:
    problems = []
    for r in (b.d1, b.d0, b.support):
        if r not in p:
            problems.append(f"{r} is not a region of {p.name}")
    if not problems:
        if not p.leq(b.d1, b.support):
            problems.append(f"source {b.d1} not below support {b.support}")
        if not p.leq(b.d0, b.support):
            problems.append(f"target {b.d0} not below support {b.support}")
    return problems


def check_face_relations(p: Poset, c: Simplex2) -> List[str]:
    """Independent check of the face identities of a 2-simplex; returns the failures."""
    problems = []
    for face in c.faces:
        problems.extend(check_simplex1(p, face))
    if problems:
        return problems
    # d_h d_k c = d_k d_{h+1} c for h >= k
    if c.d0.d0 != c.d1.d0:
        problems.append("d0 d0 c != d0 d1 c")
    if c.d0.d1 != c.d2.d0:
        problems.append("d1 d0 c != d0 d2 c")
    if c.d1.d1 != c.d2.d1:
        problems.append("d1 d1 c != d1 d2 c")
    for h, face in ((0, c.d0), (1, c.d1), (2, c.d2)):
        if not p.leq(face.support, c.support):
            problems.append(f"|d{h} c| not below |c|")
    return problems


def nerve_subsets(p: Poset) -> Tuple[List[Simplex1], List[Simplex2]]:
    """
    N1: inclusions b0 <= |b| as (b0, |b|; |b|).
    N2: chains c0 <= c1 <= |c| as the triangle with vertices (c0, c1, |c|).
    """
    n1 = [Simplex1(lo, hi, hi) for hi in p.regions for lo in p.below(hi)]
    n2 = []
    for c2 in p.regions:
        for c1 in p.below(c2):
            for c0 in p.below(c1):
                n2.append(Simplex2(d0=Simplex1(c1, c2, c2), d2=Simplex1(c0, c1, c1),
                                   d1=Simplex1(c0, c2, c2), support=c2))
    n1.sort(key=lambda b: b.key)
    n2.sort(key=lambda c: c.key)
    return n1, n2


def simplex_graph(p: Poset) -> nx.Graph:
    """Regions joined when they share an upper bound; edges carry the smallest such support."""
    g = nx.Graph()
    g.add_nodes_from(r.id for r in p.regions)
    leq = p.leq_matrix
    for i, x in enumerate(p.regions):
        for j in range(i + 1, len(p)):
            common = np.flatnonzero(leq[i, :] & leq[j, :])
            if common.size:
                g.add_edge(x.id, p.regions[j].id, support=p.regions[int(common[0])].id)
    return g


def build_path_frame(p: Poset, pole: Region) -> PathFrame:
    """Breadth-first path frame: shortest 1-simplex words from the pole to every region."""
    p.index(pole)
    g = simplex_graph(p)
    routes = nx.single_source_shortest_path(g, pole.id)
    missing = [r for r in p.regions if r.id not in routes]
    if missing:
        raise DisconnectedPosetError(f"region {missing[0]} is not reachable from pole {pole} in {p.name}",
                                     witness=missing[0])

    paths = {pole: Path.of(Simplex1(pole, pole, pole))}
    for region in p.regions:
        if region == pole:
            continue
        route = routes[region.id]
        letters = []
        for x_id, y_id in zip(route, route[1:]):
            support = p.region(g.edges[x_id, y_id]["support"])
            letters.append((Simplex1(p.region(x_id), p.region(y_id), support), 1))
        paths[region] = Path.from_letters(letters)
    logger.debug(f"Path frame on {p.name} with pole {pole}")
    return PathFrame(pole=pole, paths=paths)


def simplicial_report(p: Poset) -> Dict:
    """Counts per degree with degeneracy statistics, aggregated per support with pandas."""
    rows = []
    for s in p.regions:
        below, bounds = _bounds_within(p, s)
        n1 = len(below) ** 2
        n2 = 0
        for v0 in below:
            for v1 in below:
                k2 = len(bounds[(v0.id, v1.id)])
                for v2 in below:
                    n2 += k2 * len(bounds[(v1.id, v2.id)]) * len(bounds[(v0.id, v2.id)])
        rows.append({"support": s.id, "degree": 1, "total": n1, "degenerate": 1, "inclusion": len(below)})
        rows.append({"support": s.id, "degree": 2, "total": n2, "degenerate": 1,
                     "inclusion": sum(len(p.below(c1)) for c1 in below)})
    df = pd.DataFrame(rows)
    per_degree = df.groupby("degree")[["total", "degenerate", "inclusion"]].sum()
    largest = df.groupby("degree")["total"].max()
    n1, n2 = nerve_subsets(p)
    report = {
        "poset": p.name,
        "kind": p.kind,
        "degrees": {
            "0": {"total": len(p), "degenerate": len(p)},
        },
        "nerve": {"N1": len(n1), "N2": len(n2)},
        "connected": p.is_connected(),
        "directed": p.is_directed(),
    }
    for degree, row in per_degree.iterrows():
        report["degrees"][str(degree)] = {
            "total": int(row["total"]),
            "degenerate": int(row["degenerate"]),
            "nondegenerate": int(row["total"] - row["degenerate"]),
            "inclusion": int(row["inclusion"]),
            "max_per_support": int(largest[degree]),
        }
    logger.info(f"Simplicial report for {p.name}: {report['degrees']}")
    return report
