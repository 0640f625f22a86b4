"""Dense complex linear algebra shared by the cell, bridge and automaton code.

Operators are plain ``numpy`` arrays (complex128, square).  Which basis an
array is expressed in is bookkeeping for the caller; the :class:`Basis` enum
exists so that constructors can take it as an argument.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
import scipy.linalg

DEFAULT_TOL = 1e-10


class Basis(str, enum.Enum):
    ONTOLOGICAL = "ontological"
    ENERGY = "energy"
    POSITION = "position"
    MOMENTUM = "momentum"
    PRODUCT = "product"


class ConvergenceError(RuntimeError):
    """An eigensolver failed to converge."""


def as_square(m) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise ValueError(f"expected a non-empty square matrix, got shape {a.shape}")
    return a


def dagger(m: np.ndarray) -> np.ndarray:
    return np.conj(np.transpose(m))


def is_hermitian(m, tol: float = DEFAULT_TOL) -> bool:
    a = as_square(m)
    return bool(np.max(np.abs(a - dagger(a))) <= tol)


def is_unitary(m, tol: float = DEFAULT_TOL) -> bool:
    a = as_square(m)
    return bool(np.max(np.abs(a @ dagger(a) - np.eye(len(a)))) <= tol)


def is_normal(m, tol: float = DEFAULT_TOL) -> bool:
    a = as_square(m)
    scale = max(1.0, float(np.max(np.abs(a))) ** 2)
    return bool(np.max(np.abs(a @ dagger(a) - dagger(a) @ a)) <= tol * scale)


def max_abs_diff(a, b) -> float:
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch {a.shape} vs {b.shape}")
    if a.size == 0:
        return 0.0
    return float(np.max(np.abs(a - b)))


def mat_exp(m, scale: complex = 1.0) -> np.ndarray:
    """Return ``exp(scale * m)``.

    Hermitian input goes through ``eigh``; other normal matrices through a
    complex Schur form (diagonal for normal input); anything else falls back to
    Pade scaling-and-squaring.  A Hermitian ``m`` with imaginary ``scale`` gives
    a unitary result to rounding.
    """
    a = as_square(m)
    scale = complex(scale)
    if scale == 0:
        return np.eye(len(a), dtype=complex)
    try:
        if is_hermitian(a, tol=1e-13 * max(1.0, float(np.max(np.abs(a))))):
            h = 0.5 * (a + dagger(a))
            w, v = np.linalg.eigh(h)
            return (v * np.exp(scale * w)) @ dagger(v)
        if is_normal(a, tol=1e-13):
            t, z = scipy.linalg.schur(a, output="complex")
            d = np.diag(t)
            return (z * np.exp(scale * d)) @ dagger(z)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(str(exc)) from exc
    return scipy.linalg.expm(scale * a)


@dataclass(frozen=True)
class PermutationCheck:
    """Outcome of :func:`is_permutation`.

    ``mapping[k]`` is the row holding the unit entry of column ``k`` (so the
    matrix sends basis state ``k`` to ``mapping[k]``).  ``phases`` are the
    values of those entries; ``residual`` is the largest deviation of the
    matrix moduli from a 0/1 pattern.
    """

    ok: bool
    mapping: np.ndarray | None
    phases: np.ndarray | None
    residual: float

    def __bool__(self) -> bool:
        return self.ok


def is_permutation(m, tol: float = DEFAULT_TOL) -> PermutationCheck:
    a = as_square(m)
    mod = np.abs(a)
    rows = np.argmax(mod, axis=0)
    cols = np.arange(len(a))
    pattern = np.zeros_like(mod)
    pattern[rows, cols] = 1.0
    residual = float(np.max(np.abs(mod - pattern)))
    bijective = len(np.unique(rows)) == len(rows)
    if residual <= tol and bijective:
        return PermutationCheck(True, rows.astype(int), a[rows, cols].copy(), residual)
    return PermutationCheck(False, None, None, residual)


def commutator(a, b) -> np.ndarray:
    a = as_square(a)
    b = as_square(b)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch {a.shape} vs {b.shape}")
    return a @ b - b @ a


def commutator_norm(a, b) -> float:
    """Frobenius norm of ``ab - ba``."""
    return float(np.linalg.norm(commutator(a, b)))
