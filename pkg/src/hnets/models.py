# src/hnets/models.py
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

from hnets.exceptions import PathError

MAX_STORED_VIOLATIONS = 50


@dataclass(frozen=True, order=True)
class Region:
    """An element of the base poset. Identity and order are by ``id`` only."""
    id: int
    payload: Tuple = field(default=(), compare=False)
    label: str = field(default="", compare=False)

    def __str__(self) -> str:
        return self.label or f"r{self.id}"


@dataclass(frozen=True, order=True)
class Simplex1:
    """Oriented line b = (d1, d0; support): from d1 to d0 inside the support."""
    d1: Region
    d0: Region
    support: Region

    @property
    def is_degenerate(self) -> bool:
        return self.d1 == self.d0 == self.support

    @property
    def is_inclusion(self) -> bool:
        """True for (a, o; o), the simplices carried by the nerve."""
        return self.d0 == self.support

    def reverse(self) -> "Simplex1":
        return Simplex1(self.d0, self.d1, self.support)

    @property
    def key(self) -> Tuple[int, int, int]:
        return (self.d1.id, self.d0.id, self.support.id)

    def __str__(self) -> str:
        return f"({self.d1},{self.d0};{self.support})"


@dataclass(frozen=True, order=True)
class Simplex2:
    """
    Oriented triangle with vertices (v0, v1, v2).

    d2 runs v0 -> v1, d0 runs v1 -> v2 and d1 runs v0 -> v2; every face
    support lies below ``support``.
    """
    d0: Simplex1
    d2: Simplex1
    d1: Simplex1
    support: Region

    @property
    def faces(self) -> Tuple[Simplex1, Simplex1, Simplex1]:
        return (self.d0, self.d2, self.d1)

    @property
    def vertices(self) -> Tuple[Region, Region, Region]:
        return (self.d2.d1, self.d2.d0, self.d0.d0)

    @property
    def is_degenerate(self) -> bool:
        return all(f.is_degenerate for f in self.faces)

    @property
    def key(self) -> Tuple[int, ...]:
        return self.d0.key + self.d2.key + self.d1.key + (self.support.id,)

    def __str__(self) -> str:
        return f"<{self.d0},{self.d2},{self.d1};{self.support}>"


Letter = Tuple[Simplex1, int]


def letter_source(letter: Letter) -> Region:
    simplex, orientation = letter
    return simplex.d1 if orientation > 0 else simplex.d0


def letter_target(letter: Letter) -> Region:
    simplex, orientation = letter
    return simplex.d0 if orientation > 0 else simplex.d1


@dataclass(frozen=True)
class Path:
    """
    Word of oriented 1-simplices in traversal order.

    The letter (b, +1) runs from b.d1 to b.d0, (b, -1) runs back.
    """
    word: Tuple[Letter, ...]
    source: Region
    target: Region

    def __post_init__(self):
        word = tuple(self.word)
        object.__setattr__(self, "word", word)
        if not word:
            if self.source != self.target:
                raise PathError(f"empty path must be a loop, got {self.source} -> {self.target}")
            return
        for simplex, orientation in word:
            if orientation not in (1, -1):
                raise PathError(f"orientation must be +1 or -1, got {orientation}", witness=simplex)
        if letter_source(word[0]) != self.source:
            raise PathError(f"path does not start at {self.source}", witness=word[0][0])
        if letter_target(word[-1]) != self.target:
            raise PathError(f"path does not end at {self.target}", witness=word[-1][0])
        for k in range(len(word) - 1):
            if letter_target(word[k]) != letter_source(word[k + 1]):
                raise PathError(f"letters {k} and {k + 1} do not compose", witness=word[k + 1][0])

    @classmethod
    def identity(cls, region: Region) -> "Path":
        return cls((), region, region)

    @classmethod
    def of(cls, simplex: Simplex1, orientation: int = 1) -> "Path":
        letter = (simplex, orientation)
        return cls((letter,), letter_source(letter), letter_target(letter))

    @classmethod
    def from_letters(cls, letters, source: Optional[Region] = None) -> "Path":
        letters = tuple(letters)
        if not letters:
            if source is None:
                raise PathError("cannot infer the endpoint of an empty path")
            return cls.identity(source)
        return cls(letters, letter_source(letters[0]), letter_target(letters[-1]))

    def then(self, other: "Path") -> "Path":
        """This path followed by ``other``."""
        if self.target != other.source:
            raise PathError(f"cannot compose: {self.target} != {other.source}")
        return Path(self.word + other.word, self.source, other.target)

    def reverse(self) -> "Path":
        return Path(tuple((b, -o) for b, o in reversed(self.word)), self.target, self.source)

    def power(self, k: int) -> "Path":
        if not self.is_loop:
            raise PathError("only loops can be raised to a power")
        base = self if k >= 0 else self.reverse()
        result = Path.identity(self.source)
        for _ in range(abs(k)):
            result = result.then(base)
        return result

    @property
    def is_loop(self) -> bool:
        return self.source == self.target

    def regions(self) -> List[Region]:
        seen = {self.source: None}
        for b, _ in self.word:
            for r in (b.d1, b.d0, b.support):
                seen.setdefault(r, None)
        return list(seen)

    def __len__(self) -> int:
        return len(self.word)

    def __str__(self) -> str:
        if not self.word:
            return f"[{self.source}]"
        return " * ".join(f"{b}{'' if o > 0 else '^-1'}" for b, o in self.word)


@dataclass
class PathFrame:
    """Paths from the pole to every region; paths[pole] is the degenerate simplex."""
    pole: Region
    paths: Dict[Region, Path] = field(default_factory=dict)

    def path_to(self, region: Region) -> Path:
        try:
            return self.paths[region]
        except KeyError:
            raise PathError(f"region {region} is not in the frame") from None

    def path_from(self, region: Region) -> Path:
        return self.path_to(region).reverse()


GenWord = Tuple[Tuple[int, int], ...]


@dataclass
class Pi1Presentation:
    """
    Edge-path presentation of the fundamental group of a poset.

    ``edges`` are the 1-cells of the chosen skeleton; ``tree`` is a spanning
    tree among them, ``generators`` the remaining edges. Relations are words
    in generator indices, one per 2-cell, tree edges deleted.
    """
    basepoint: Region
    skeleton: str
    edges: Tuple[Simplex1, ...]
    tree: Tuple[Simplex1, ...]
    generators: Tuple[Simplex1, ...]
    relations: Tuple[GenWord, ...]
    witnesses: Tuple[Any, ...]
    tree_paths: Dict[Region, Tuple[Letter, ...]] = field(repr=False)
    poset: Any = field(repr=False, compare=False, default=None)
    generator_index: Dict[Simplex1, int] = field(init=False, repr=False)

    def __post_init__(self):
        self.generator_index = {g: i for i, g in enumerate(self.generators)}

    @property
    def rank(self) -> int:
        return len(self.generators)


@dataclass
class Violation:
    witness: str
    residual: float
    detail: str = ""


@dataclass
class CheckReport:
    """Outcome of checking one law over many instances."""
    law: str
    tolerance: float = 1e-9
    passed: bool = True
    checked: int = 0
    failures: int = 0
    max_residual: float = 0.0
    total_residual: float = 0.0
    violations: List[Violation] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)

    def record(self, witness: Any, residual: float, detail: str = "") -> bool:
        """Add one instance; returns True when it is within tolerance."""
        residual = float(residual)
        self.checked += 1
        self.total_residual += residual
        self.max_residual = max(self.max_residual, residual)
        if residual < self.tolerance:
            return True
        self.passed = False
        self.failures += 1
        if len(self.violations) < MAX_STORED_VIOLATIONS:
            self.violations.append(Violation(str(witness), residual, detail))
        return False

    def fail(self, witness: Any, detail: str):
        """Record a failure that has no numerical residual."""
        self.checked += 1
        self.passed = False
        self.failures += 1
        if len(self.violations) < MAX_STORED_VIOLATIONS:
            self.violations.append(Violation(str(witness), float("inf"), detail))

    @property
    def mean_residual(self) -> float:
        return self.total_residual / self.checked if self.checked else 0.0

    @property
    def first_witness(self) -> Optional[str]:
        return self.violations[0].witness if self.violations else None


def all_passed(reports) -> bool:
    return all(r.passed for r in reports)
