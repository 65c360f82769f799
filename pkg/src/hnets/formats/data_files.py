# src/hnets/formats/data_files.py

import logging
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Tuple

import numpy as np

from hnets.algebra.groupkit import (FiniteGroup, GradedGroup, NormalizerData, make_cyclic_phase_group,
                                    make_pauli_group, make_symmetric_group, normalizer_quotient)
from hnets.algebra.netbundle import NetBundle
from hnets.exceptions import FormatError, GroupError, HnetsError
from hnets.formats.poset_files import parse_poset_spec, resolve_region, split_product
from hnets.gauge.gerbekit import LiftProblem, gerbe_from_projective, pauli_projective_holonomy
from hnets.gauge.twistkit import winding_hom
from hnets.models import Simplex1
from hnets.sectors.cocycle_cat import Cocycle
from hnets.sectors.sector_stats import winding_character
from hnets.topology.homotopy import HolonomyMorphism, edge_windings, evaluate_hom, homotopy_engine
from hnets.topology.poset_core import Poset
from hnets.topology.simplicial import build_path_frame

logger = logging.getLogger(__name__)

PAULI_NAMES = ("I", "X", "Y", "Z")


@dataclass
class Entry:
    line: int
    keyword: str
    args: List[str]
    rhs: Optional[str] = None


@dataclass
class DataFile:
    """A parsed line-oriented data file: ``keyword args... [: matrix]`` per line."""
    source: str
    entries: List[Entry] = field(default_factory=list)

    def first(self, keyword: str) -> Optional[Entry]:
        return next((e for e in self.entries if e.keyword == keyword), None)

    def all(self, keyword: str) -> List[Entry]:
        return [e for e in self.entries if e.keyword == keyword]

    def require(self, keyword: str) -> Entry:
        entry = self.first(keyword)
        if entry is None:
            raise FormatError(f"missing '{keyword}' line", None, self.source)
        return entry

    def check_keywords(self, allowed):
        for e in self.entries:
            if e.keyword not in allowed:
                raise FormatError(f"unknown keyword {e.keyword!r}", e.line, self.source)


def read_data_file(path: str) -> DataFile:
    if not os.path.exists(path):
        raise FormatError(f"file not found: {path}")
    data = DataFile(path)
    with open(path, "r") as f:
        for lineno, raw in enumerate(f, start=1):
            text = raw.split("#", 1)[0].strip()
            if not text:
                continue
            # poset specs contain colons; only " : " separates a matrix
            lhs, sep, rhs = text.partition(" : ")
            words = lhs.split()
            data.entries.append(Entry(lineno, words[0], words[1:], rhs.strip() if sep else None))
    logger.debug(f"Read {len(data.entries)} entries from {path}")
    return data


def parse_matrix(text: str, dim: Optional[int] = None, line: Optional[int] = None,
                 source: Optional[str] = None) -> np.ndarray:
    """
    A matrix: rows separated by ';' and complex entries by spaces ("0 1; 1 0",
    "1j"), a Pauli name ("X", "-iZ"), or ``phase P/Q`` for exp(2 pi i P/Q) times 1_dim.
    """
    text = text.strip()
    if text.startswith("phase"):
        if dim is None:
            raise FormatError("a phase matrix needs a 'dim' line", line, source)
        try:
            theta = Fraction(text.split()[1])
        except (IndexError, ValueError):
            raise FormatError(f"malformed phase {text!r}", line, source) from None
        return np.exp(2j * np.pi * float(theta)) * np.eye(dim, dtype=complex)
    if text.lstrip("-i") in PAULI_NAMES:
        _, data = make_pauli_group()
        label = text[:-1] + "1" if text.endswith("I") else text
        try:
            return data.ambient.matrix(data.ambient.labels.index(label))
        except ValueError:
            raise FormatError(f"unknown Pauli element {text!r}", line, source) from None
    try:
        rows = [[complex(tok.replace("i", "j")) for tok in row.split()] for row in text.split(";")]
    except ValueError:
        raise FormatError(f"malformed matrix {text!r}", line, source) from None
    m = np.array(rows, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise FormatError(f"matrix is not square: {text!r}", line, source)
    if dim is not None and m.shape[0] != dim:
        raise FormatError(f"expected a {dim}x{dim} matrix, got {m.shape[0]}x{m.shape[1]}", line, source)
    return m


def _poset_of(data: DataFile) -> Poset:
    entry = data.require("poset")
    try:
        return parse_poset_spec(" ".join(entry.args), os.path.dirname(data.source))
    except FormatError:
        raise
    except HnetsError as e:
        raise FormatError(str(e), entry.line, data.source) from e


def _dim_of(data: DataFile) -> Optional[int]:
    entry = data.first("dim")
    if entry is None:
        return None
    try:
        return int(entry.args[0])
    except (IndexError, ValueError):
        raise FormatError("malformed dim line", entry.line, data.source) from None


def _rhs(data: DataFile, entry: Entry, dim: Optional[int]) -> np.ndarray:
    if entry.rhs is None:
        raise FormatError(f"{entry.keyword} line needs ' : <matrix>'", entry.line, data.source)
    return parse_matrix(entry.rhs, dim, entry.line, data.source)


# --- groups -------------------------------------------------------------------

@dataclass
class GroupData:
    group: FiniteGroup
    normalizer: Optional[NormalizerData] = None
    graded: Optional[GradedGroup] = None
    spec: str = ""


def make_group(kind: str, n: Optional[int] = None, d: Optional[int] = None) -> GroupData:
    """Named group constructors shared by group files and the CLI."""
    if kind == "pauli":
        graded, data = make_pauli_group()
        return GroupData(data.ambient, data, graded, "pauli")
    if kind == "cyclic":
        if n is None:
            raise GroupError("cyclic groups need n")
        return GroupData(make_cyclic_phase_group(n, d or 1), spec=f"cyclic {n} {d or 1}")
    if kind == "symmetric":
        if n is None:
            raise GroupError("symmetric groups need n")
        return GroupData(make_symmetric_group(n), spec=f"symmetric {n}")
    raise GroupError(f"unknown group kind {kind!r}")


def read_group(path: str) -> GroupData:
    """``group pauli|cyclic N [D]|symmetric N``, optionally ``normal center``."""
    data = read_data_file(path)
    data.check_keywords({"group", "normal"})
    entry = data.require("group")
    try:
        kind, *params = entry.args
        values = [int(p) for p in params]
        result = make_group(kind, *values)
    except (ValueError, TypeError):
        raise FormatError("malformed group line", entry.line, path) from None
    except GroupError as e:
        raise FormatError(str(e), entry.line, path) from e
    normal = data.first("normal")
    if normal is not None and result.normalizer is None:
        if normal.args != ["center"]:
            raise FormatError("only 'normal center' is supported", normal.line, path)
        result.normalizer = normalizer_quotient(result.group, result.group.center())
    return result


def write_group(result: GroupData, path: str):
    lines = [f"# {result.group.name}: order {result.group.order}",
             "# elements: " + " ".join(result.group.labels),
             f"group {result.spec}"]
    if result.normalizer is not None and result.spec != "pauli":
        lines.append("normal center")
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w") as f:
        f.write("\n".join(lines) + "\n")
    logger.info(f"Wrote group {result.group.name} to {path}")


# --- cocycles and bundles ------------------------------------------------------------

def read_cocycle(path: str) -> Cocycle:
    """
    Cocycle file: ``poset``, ``dim``, ``inclusion LO HI : M`` values on (LO, HI; HI)
    (identity when absent), optional ``simplex D1 D0 SUPPORT : M`` overrides and
    ``twist P/Q`` multiplying by the winding character exp(2 pi i P/Q).

    On the remaining 1-simplices z(b) = z(d0 b, |b|)* z(d1 b, |b|).
    """
    data = read_data_file(path)
    data.check_keywords({"poset", "dim", "name", "inclusion", "simplex", "twist"})
    poset = _poset_of(data)
    dim = _dim_of(data) or 1
    eye = np.eye(dim, dtype=complex)
    inclusions = {}
    for e in data.all("inclusion"):
        if len(e.args) != 2:
            raise FormatError("inclusion takes two regions", e.line, path)
        lo, hi = (resolve_region(poset, t, e.line, path) for t in e.args)
        if not poset.leq(lo, hi):
            raise FormatError(f"{lo} is not below {hi}", e.line, path)
        inclusions[(lo, hi)] = _rhs(data, e, dim)
    overrides = {}
    for e in data.all("simplex"):
        if len(e.args) != 3:
            raise FormatError("simplex takes three regions", e.line, path)
        d1, d0, s = (resolve_region(poset, t, e.line, path) for t in e.args)
        overrides[Simplex1(d1, d0, s)] = _rhs(data, e, dim)
    phase = None
    twist = data.first("twist")
    if twist is not None:
        try:
            phase = np.exp(2j * np.pi * float(Fraction(twist.args[0])))
        except (IndexError, ValueError):
            raise FormatError("malformed twist line", twist.line, path) from None
        character = winding_character(poset, phase)

    def value(b: Simplex1) -> np.ndarray:
        if b in overrides:
            return overrides[b]
        up = inclusions.get((b.d1, b.support), eye)
        down = inclusions.get((b.d0, b.support), eye)
        z = down.conj().T @ up
        return z * character(b) if phase is not None else z

    name_entry = data.first("name")
    name = " ".join(name_entry.args) if name_entry else os.path.splitext(os.path.basename(path))[0]
    logger.info(f"Read cocycle {name!r} on {poset.name}: {len(inclusions)} inclusions, {len(overrides)} overrides")
    return Cocycle.from_function(poset, value, dim=dim, name=name)


def read_bundle(path: str) -> NetBundle:
    """Bundle file: ``poset``, ``dim``, ``map LO HI : U`` for U_{HI LO}; covering pairs suffice."""
    data = read_data_file(path)
    data.check_keywords({"poset", "dim", "map"})
    poset = _poset_of(data)
    dim = _dim_of(data)
    maps = {}
    for e in data.all("map"):
        lo, hi = (resolve_region(poset, t, e.line, path) for t in e.args)
        if not poset.lt(lo, hi):
            raise FormatError(f"{lo} is not strictly below {hi}", e.line, path)
        maps[(lo, hi)] = _rhs(data, e, dim)
    if not maps:
        return NetBundle.trivial(poset, dim or 1)
    try:
        if set(maps) == set(poset.strict_pairs()):
            return NetBundle(poset, maps)
        return NetBundle.from_covers(poset, maps)
    except (HnetsError, KeyError) as e:
        raise FormatError(f"incomplete bundle: {e}", None, path) from e


# --- holonomies ---------------------------------------------------------------

def read_chi(path: str) -> HolonomyMorphism:
    """
    Holonomy file: ``poset``, ``dim`` and either ``winding : M`` (circle bases:
    chi of the winding-one loop) or ``generator K : M`` for every generator.
    """
    data = read_data_file(path)
    data.check_keywords({"poset", "dim", "winding", "generator", "basepoint"})
    poset = _poset_of(data)
    dim = _dim_of(data)
    base = data.first("basepoint")
    basepoint = resolve_region(poset, base.args[0], base.line, path) if base else None
    winding = data.first("winding")
    try:
        if winding is not None:
            m = _rhs(data, winding, dim)
            return winding_hom(poset, m, m.shape[0])
        engine = homotopy_engine(poset, basepoint)
        images = {}
        for e in data.all("generator"):
            images[int(e.args[0])] = _rhs(data, e, dim)
        return evaluate_hom(engine.presentation, images)
    except FormatError:
        raise
    except (HnetsError, ValueError) as e:
        raise FormatError(str(e), None, path) from e


def read_chibar(path: str) -> Tuple[HolonomyMorphism, NormalizerData]:
    """
    Projective holonomy file: ``poset``, ``group pauli`` and one of
    ``winding [C]`` (circle), ``product [C1] [C2]`` (a product of two equal
    circle factors) or ``generator K [C]`` lines, classes named by any member.
    """
    data = read_data_file(path)
    data.check_keywords({"poset", "group", "winding", "product", "generator"})
    group = data.require("group")
    if group.args != ["pauli"]:
        raise FormatError("projective holonomies are supported for 'group pauli'", group.line, path)
    _, normalizer = make_pauli_group()
    quotient = normalizer.quotient_group()
    try:
        product = data.first("product")
        if product is not None:
            factor_spec = " ".join(data.require("poset").args)
            factors = split_product(factor_spec[len("product:"):])
            if not factor_spec.startswith("product:") or len(set(factors)) != 1:
                raise FormatError("'product' needs a product of two equal factors", product.line, path)
            factor = parse_poset_spec(factors[0], os.path.dirname(path))
            chibar, normalizer, _ = pauli_projective_holonomy(factor, *product.args)
            return chibar, normalizer
        poset = _poset_of(data)
        engine = homotopy_engine(poset)
        winding = data.first("winding")
        if winding is not None:
            q = normalizer.coset_by_label(winding.args[0])
            windings = edge_windings(engine)
            indices = [quotient.power(q, windings[g]) for g in engine.presentation.generators]
            return evaluate_hom(engine.presentation, indices, group=quotient), normalizer
        images = {int(e.args[0]): normalizer.coset_by_label(e.args[1]) for e in data.all("generator")}
        return evaluate_hom(engine.presentation, images, group=quotient), normalizer
    except FormatError:
        raise
    except (HnetsError, ValueError, IndexError) as e:
        raise FormatError(str(e), None, path) from e


def read_problem(path: str, rng: Optional[np.random.Generator] = None) -> LiftProblem:
    """
    Lift problem file: ``poset``, ``group pauli`` and either ``chibar FILE`` with
    ``lift canonical|random`` and ``pole REGION``, or ``u LO HI LABEL`` on every
    strict inclusion.
    """
    data = read_data_file(path)
    data.check_keywords({"poset", "group", "chibar", "lift", "pole", "u"})
    group = data.require("group")
    if group.args != ["pauli"]:
        raise FormatError("lift problems are supported for 'group pauli'", group.line, path)
    chibar_entry = data.first("chibar")
    if chibar_entry is not None:
        chibar, normalizer = read_chibar(os.path.join(os.path.dirname(path), chibar_entry.args[0]))
        poset = chibar.presentation.poset
        pole_entry = data.first("pole")
        pole = resolve_region(poset, pole_entry.args[0], pole_entry.line, path) if pole_entry else poset.regions[0]
        lift = data.first("lift")
        choice = lift.args[0] if lift else "canonical"
        _, lifts = gerbe_from_projective(chibar, build_path_frame(poset, pole), normalizer, choice, rng)
        return LiftProblem.from_lifts(poset, normalizer, lifts)
    poset = _poset_of(data)
    _, normalizer = make_pauli_group()
    u = {}
    for e in data.all("u"):
        if len(e.args) != 3:
            raise FormatError("u takes two regions and an element label", e.line, path)
        lo, hi = (resolve_region(poset, t, e.line, path) for t in e.args[:2])
        try:
            u[(lo, hi)] = normalizer.ambient.labels.index(e.args[2])
        except ValueError:
            raise FormatError(f"unknown Pauli element {e.args[2]!r}", e.line, path) from None
    missing = [p for p in poset.strict_pairs() if p not in u]
    if missing:
        raise FormatError(f"no value for the inclusion {missing[0][0]} < {missing[0][1]}", None, path)
    return LiftProblem(poset, normalizer, u)
