# src/hnets/formats/poset_files.py

import logging
import os
from typing import List, Optional, Tuple

from hnets.exceptions import FormatError, PosetError
from hnets.models import Region
from hnets.topology.poset_core import (Poset, build_circle_base, build_custom, build_minimal_circle_base,
                                       build_minkowski2d_base, build_product_base)

logger = logging.getLogger(__name__)

# named spec -> number of integer parameters
NAMED_KINDS = {"circle": 2, "minkowski": 3, "mincircle": 0, "diamond": 0}


def split_product(body: str) -> List[str]:
    """Split 'A*B' at top-level stars; parenthesised factors may contain their own products."""
    parts, depth, start = [], 0, 0
    for k, ch in enumerate(body):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == "*" and depth == 0:
            parts.append(body[start:k])
            start = k + 1
    parts.append(body[start:])
    return [p[1:-1] if p.startswith("(") and p.endswith(")") else p for p in parts]


def parse_poset_spec(spec: str, base_dir: Optional[str] = None) -> Poset:
    """
    Build a poset from a spec string.

    Forms: ``circle:M:L``, ``minkowski:NX:NT:S``, ``mincircle`` (alias ``diamond``),
    ``product:A*B`` with specs A and B, ``file:PATH``.
    """
    spec = spec.strip()
    if not spec:
        raise FormatError("empty poset spec")
    head, _, rest = spec.partition(":")
    if head == "product":
        factors = split_product(rest)
        if len(factors) < 2 or not all(factors):
            raise FormatError(f"product spec needs at least two factors: {spec!r}")
        poset = parse_poset_spec(factors[0], base_dir)
        for factor in factors[1:]:
            poset = build_product_base(poset, parse_poset_spec(factor, base_dir))
        return poset
    if head == "file":
        path = rest if os.path.isabs(rest) or base_dir is None else os.path.join(base_dir, rest)
        return read_poset(path)
    if head not in NAMED_KINDS:
        raise FormatError(f"unknown poset kind {head!r} in spec {spec!r}")
    args = [a for a in rest.split(":") if a] if rest else []
    if len(args) != NAMED_KINDS[head]:
        raise FormatError(f"{head} spec takes {NAMED_KINDS[head]} parameters, got {len(args)}: {spec!r}")
    try:
        values = [int(a) for a in args]
    except ValueError:
        raise FormatError(f"non-integer parameter in poset spec {spec!r}") from None
    if head == "circle":
        return build_circle_base(*values)
    if head == "minkowski":
        return build_minkowski2d_base(*values)
    return build_minimal_circle_base()


def resolve_region(poset: Poset, token: str, line: Optional[int] = None, source: Optional[str] = None) -> Region:
    """A region by label, by id, or by 'r<id>'."""
    for r in poset.regions:
        if str(r) == token:
            return r
    digits = token[1:] if token.startswith("r") else token
    if digits.isdigit():
        try:
            return poset.region(int(digits))
        except PosetError:
            pass
    raise FormatError(f"no region {token!r} in {poset.name}", line, source)


def read_poset(path: str) -> Poset:
    """
    Poset file: either one ``spec SPEC`` line, or ``name``, ``region ID [LABEL]``,
    ``leq LO HI`` and ``perp A B`` lines. ``#`` starts a comment.
    """
    if not os.path.exists(path):
        raise FormatError(f"poset file not found: {path}")
    with open(path, "r") as f:
        lines = f.readlines()
    name = os.path.splitext(os.path.basename(path))[0]
    ids: List[int] = []
    labels = {}
    leq: List[Tuple[int, int]] = []
    perp: List[Tuple[int, int]] = []
    spec = None
    for lineno, raw in enumerate(lines, start=1):
        text = raw.split("#", 1)[0].strip()
        if not text:
            continue
        keyword, *args = text.split()
        try:
            if keyword == "spec":
                spec = " ".join(args)
            elif keyword == "name":
                name = " ".join(args)
            elif keyword == "region":
                ids.append(int(args[0]))
                if len(args) > 1:
                    labels[int(args[0])] = args[1]
            elif keyword in ("leq", "perp"):
                if len(args) != 2:
                    raise FormatError(f"{keyword} takes two region ids", lineno, path)
                (leq if keyword == "leq" else perp).append((int(args[0]), int(args[1])))
            else:
                raise FormatError(f"unknown keyword {keyword!r}", lineno, path)
        except (ValueError, IndexError):
            raise FormatError(f"malformed {keyword} line", lineno, path) from None
    if spec is not None:
        if ids or leq or perp:
            raise FormatError("a poset file holds either a spec line or an explicit listing", None, path)
        poset = parse_poset_spec(spec, os.path.dirname(path))
    else:
        if not ids:
            raise FormatError("poset file lists no regions", None, path)
        try:
            poset = build_custom(name, ids, leq, perp, labels)
        except PosetError as e:
            raise FormatError(str(e), None, path) from e
    logger.info(f"Read poset {poset.name} ({len(poset)} regions) from {path}")
    return poset


def write_poset(poset: Poset, path: str, spec: Optional[str] = None):
    """Write a spec line when the poset came from a named builder, else the explicit listing."""
    lines = [f"# hnets poset {poset.name}: {len(poset)} regions, kind {poset.kind}"]
    if spec is not None:
        lines.append(f"spec {spec}")
    else:
        lines.append(f"name {poset.name}")
        for r in poset.regions:
            lines.append(f"region {r.id} {r}")
        for lo, hi in poset.covers:
            lines.append(f"leq {lo.id} {hi.id}")
        for i, a in enumerate(poset.regions):
            for b in poset.regions[i + 1:]:
                if poset.perp(a, b):
                    lines.append(f"perp {a.id} {b.id}")
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w") as f:
        f.write("\n".join(lines) + "\n")
    logger.info(f"Wrote poset {poset.name} to {path}")
