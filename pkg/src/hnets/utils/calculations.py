# src/hnets/utils/calculations.py

import logging
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence

import numpy as np
import pandas as pd
from scipy import linalg

# Configure a logger for this module
logger = logging.getLogger(__name__)

DEFAULT_TOLERANCE = 1e-9
KEY_DECIMALS = 7


def dagger(a: np.ndarray) -> np.ndarray:
    return a.conj().T


def max_norm(a: np.ndarray) -> float:
    """Largest absolute entry; 0 for an empty array."""
    a = np.asarray(a)
    if a.size == 0:
        return 0.0
    return float(np.max(np.abs(a)))


def distance(a: np.ndarray, b: np.ndarray) -> float:
    return max_norm(np.asarray(a) - np.asarray(b))


def close(a: np.ndarray, b: np.ndarray, tol: float = DEFAULT_TOLERANCE) -> bool:
    return distance(a, b) < tol


def identity(dim: int) -> np.ndarray:
    return np.eye(dim, dtype=complex)


def unitarity_defect(u: np.ndarray) -> float:
    u = np.asarray(u)
    return distance(u @ dagger(u), np.eye(u.shape[0]))


def is_unitary(u: np.ndarray, tol: float = DEFAULT_TOLERANCE) -> bool:
    return unitarity_defect(u) < tol


def scalar_value(m: np.ndarray, tol: float = DEFAULT_TOLERANCE) -> Optional[complex]:
    """Return c if ``m`` equals c times the identity, else None."""
    m = np.asarray(m)
    c = complex(m[0, 0])
    if distance(m, c * np.eye(m.shape[0])) < tol:
        return c
    return None


def bracket(a: np.ndarray, b: np.ndarray, anti: bool = False) -> np.ndarray:
    """Commutator ab - ba, or the anticommutator ab + ba."""
    return a @ b + b @ a if anti else a @ b - b @ a


def conjugate_by(u: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Ad u (t) = u t u*."""
    return u @ t @ dagger(u)


def ordered_product(factors: Iterable[np.ndarray], dim: int) -> np.ndarray:
    """Product f_n ... f_1 of factors given in the order f_1, ..., f_n."""
    result = np.eye(dim, dtype=complex)
    for f in factors:
        result = f @ result
    return result


def matrix_key(m: np.ndarray, decimals: int = KEY_DECIMALS) -> bytes:
    """Hashable fingerprint of a matrix, stable under noise well below 10^-decimals."""
    rounded = np.round(np.asarray(m, dtype=complex), decimals) + 0.0
    return rounded.tobytes()


def polar_unitary(x: np.ndarray) -> np.ndarray:
    u, _ = linalg.polar(x)
    return u


def intertwiner_space(sources: Sequence[np.ndarray], targets: Sequence[np.ndarray],
                      tol: float = DEFAULT_TOLERANCE, max_dim: int = 32) -> List[np.ndarray]:
    """
    Basis of {X : X A_i = B_i X for all i}.

    Solved densely through the Gram matrix of the stacked linear constraints,
    so the matrices must be at most ``max_dim`` square.

    Args:
        sources: matrices A_i
        targets: matrices B_i, same length and shapes as ``sources``
        tol: eigenvalue threshold for the null space
        max_dim: refuse larger problems

    Returns:
        List of matrices spanning the intertwiner space (orthonormal in Hilbert-Schmidt norm)
    """
    if len(sources) != len(targets):
        raise ValueError("sources and targets must have the same length")
    if not sources:
        raise ValueError("at least one pair of matrices is required")
    d_in = sources[0].shape[0]
    d_out = targets[0].shape[0]
    if max(d_in, d_out) > max_dim:
        raise ValueError(f"intertwiner problem of size {d_out}x{d_in} exceeds max_dim={max_dim}")

    n = d_in * d_out
    gram = np.zeros((n, n), dtype=complex)
    eye_in = np.eye(d_in)
    eye_out = np.eye(d_out)
    seen = set()
    for a, b in zip(sources, targets):
        key = matrix_key(a) + matrix_key(b)
        if key in seen:
            continue
        seen.add(key)
        # vec(X A - B X) with column-major vec
        k = np.kron(a.T, eye_out) - np.kron(eye_in, b)
        gram += dagger(k) @ k
    values, vectors = linalg.eigh(gram)
    scale = max(1.0, float(np.max(np.abs(values))) if values.size else 1.0)
    basis = []
    for value, vec in zip(values, vectors.T):
        if value < tol * scale:
            basis.append(vec.reshape((d_out, d_in), order="F"))
    logger.debug(f"Intertwiner space of {len(sources)} pairs in dim {d_out}x{d_in}: dimension {len(basis)}")
    return basis


def unit_phase_fraction(phase: complex, max_denominator: int = 10 ** 6,
                        tol: float = DEFAULT_TOLERANCE):
    """
    (1/2pi) arg(phase) mod 1, as a Fraction when it is rational within tolerance.

    Returns:
        Fraction in [0, 1) when a nearby rational with denominator <= max_denominator
        exists, otherwise the float value in [0, 1)
    """
    value = float(np.angle(phase) / (2 * np.pi)) % 1.0
    frac = Fraction(value).limit_denominator(max_denominator)
    if abs(float(frac) - value) < tol:
        return frac % 1
    if abs(value - 1.0) < tol:
        return Fraction(0)
    return value


def summarize_residuals(records: Iterable[Dict]) -> Dict[str, Dict[str, float]]:
    """
    Aggregate residual records per law.

    Args:
        records: dicts with at least 'law' and 'residual' keys

    Returns:
        {law: {"count": n, "max": ..., "mean": ...}} sorted by law
    """
    df = pd.DataFrame(list(records), columns=None)
    if df.empty:
        return {}
    grouped = df.groupby("law")["residual"].agg(["count", "max", "mean"]).sort_index()
    summary = {
        law: {"count": int(row["count"]), "max": float(row["max"]), "mean": float(row["mean"])}
        for law, row in grouped.iterrows()
    }
    logger.debug(f"Summarized {len(df)} residual records over {len(summary)} laws")
    return summary


class MatrixValidator:
    """Utility class for validating matrices before they enter a construction."""

    @staticmethod
    def validate_square(m: np.ndarray, dim: Optional[int] = None) -> bool:
        """Check that ``m`` is a square 2d array, optionally of a given size."""
        m = np.asarray(m)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            logger.debug(f"Matrix validation failed: shape {m.shape} is not square.")
            return False
        if dim is not None and m.shape[0] != dim:
            logger.debug(f"Matrix validation failed: expected dimension {dim}, got {m.shape[0]}.")
            return False
        return True

    @staticmethod
    def validate_unitary(m: np.ndarray, tol: float = DEFAULT_TOLERANCE) -> bool:
        """Check that ``m`` is square and unitary within tolerance."""
        if not MatrixValidator.validate_square(m):
            return False
        defect = unitarity_defect(m)
        if defect >= tol:
            logger.debug(f"Matrix validation failed: unitarity defect {defect:.3e}.")
            return False
        return True

    @staticmethod
    def validate_self_adjoint(m: np.ndarray, tol: float = DEFAULT_TOLERANCE) -> bool:
        defect = distance(m, dagger(m))
        if defect >= tol:
            logger.debug(f"Matrix validation failed: self-adjointness defect {defect:.3e}.")
            return False
        return True
