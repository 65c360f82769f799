# src/hnets/algebra/local_algebras.py

import logging
from typing import List, Optional, Protocol, Sequence, runtime_checkable

import numpy as np
from scipy import linalg

from hnets.utils.calculations import DEFAULT_TOLERANCE, bracket, dagger, max_norm

logger = logging.getLogger(__name__)


@runtime_checkable
class LocalAlgebra(Protocol):
    """A *-subalgebra of the d x d matrices with a membership test and a generating set."""
    dim: int

    def contains(self, t: np.ndarray, tol: float = DEFAULT_TOLERANCE) -> bool:
        ...

    def generators(self) -> List[np.ndarray]:
        ...


class FullMatrixAlgebra:
    def __init__(self, dim: int):
        self.dim = dim

    def contains(self, t: np.ndarray, tol: float = DEFAULT_TOLERANCE) -> bool:
        return np.shape(t) == (self.dim, self.dim)

    def commutant_constraints(self) -> List[np.ndarray]:
        return []

    def generators(self) -> List[np.ndarray]:
        units = []
        for i in range(self.dim):
            for j in range(self.dim):
                e = np.zeros((self.dim, self.dim), dtype=complex)
                e[i, j] = 1
                units.append(e)
        return units

    def __repr__(self) -> str:
        return f"FullMatrixAlgebra(dim={self.dim})"


class SpanAlgebra:
    """
    Algebra given by a linear basis (already closed under products and adjoints).

    Membership is tested by projecting onto the Hilbert-Schmidt orthonormalised span.
    """

    def __init__(self, basis: Sequence[np.ndarray], name: str = ""):
        if not basis:
            raise ValueError("a span algebra needs at least one basis matrix")
        self.dim = np.shape(basis[0])[0]
        self.name = name
        self._basis = [np.asarray(b, dtype=complex) for b in basis]
        stacked = np.array([b.reshape(-1) for b in self._basis]).T
        q, r = linalg.qr(stacked, mode="economic")
        keep = np.abs(np.diag(r)) > DEFAULT_TOLERANCE * max(1.0, max_norm(r))
        self._q = q[:, keep]

    def contains(self, t: np.ndarray, tol: float = DEFAULT_TOLERANCE) -> bool:
        v = np.asarray(t, dtype=complex).reshape(-1)
        residual = v - self._q @ (dagger(self._q) @ v)
        return max_norm(residual) < tol

    def generators(self) -> List[np.ndarray]:
        return list(self._basis)

    def __repr__(self) -> str:
        return f"SpanAlgebra({self.name!r}, dim={self.dim}, rank={self._q.shape[1]})"


class GradedCommutantAlgebra:
    """
    Operators whose even part commutes and odd part anticommutes with the
    given odd operators (parity ``gamma``), and which commute with ``commute_with``.

    ``gens`` is a generating set used for checks over the algebra; membership
    itself is decided from the commutation conditions.
    """

    def __init__(self, gamma: np.ndarray, odd_outside: Sequence[np.ndarray],
                 commute_with: Sequence[np.ndarray] = (), gens: Optional[Sequence[np.ndarray]] = None,
                 name: str = "", even_only: bool = False):
        self.dim = gamma.shape[0]
        self.gamma = gamma
        self.odd_outside = list(odd_outside)
        self.commute_with = list(commute_with)
        self._gens = list(gens or [])
        self.name = name
        self.even_only = even_only
        logger.debug(f"GradedCommutantAlgebra {name!r}: {len(self.odd_outside)} odd constraints, "
                     f"{len(self.commute_with)} ordinary constraints")

    def split(self, t: np.ndarray):
        flipped = self.gamma @ t @ self.gamma
        return (t + flipped) / 2, (t - flipped) / 2

    def contains(self, t: np.ndarray, tol: float = DEFAULT_TOLERANCE) -> bool:
        even, odd = self.split(t)
        if self.even_only and max_norm(odd) >= tol:
            return False
        for c in self.odd_outside:
            if max_norm(bracket(even, c)) >= tol or max_norm(bracket(odd, c, anti=True)) >= tol:
                return False
        return all(max_norm(bracket(t, v)) < tol for v in self.commute_with)

    def commutant_constraints(self) -> List[np.ndarray]:
        """Matrices every element commutes with; only available when the algebra is purely even."""
        if not self.even_only:
            raise AttributeError("graded commutation is not a plain commutant constraint")
        return [self.gamma] + self.odd_outside + self.commute_with

    def generators(self) -> List[np.ndarray]:
        return list(self._gens)

    def __repr__(self) -> str:
        return f"GradedCommutantAlgebra({self.name!r}, dim={self.dim})"
