"""The basis change between the ``x`` and ``p`` eigenbases of a finite cell.

Rows are labelled by ``r`` (eigenvalue of ``L1``, so ``x``-like after the
axis relabelling) and columns by ``s`` (``L3`` label); both run over
``-ell, ..., +ell``.  Row ``r`` solves the three-term recursion

    2 r M[r, s] = sqrt((ell+1-s)(ell+s)) M[r, s-1]
                + sqrt((ell+1+s)(ell-s)) M[r, s+1],

i.e. it is an eigenvector of the symmetric tridiagonal matrix ``2 L1``.

Two constructions are provided and cross-checked: the tridiagonal
eigensolver, and the exponential ``exp(i pi L1 / 2)`` brought to a real
matrix by diagonal phase alignment.  Sign convention (fixed by
``phase_convention="real_positive_edge"``): every row has a positive entry in
the ``s = +ell`` column and every column a positive entry in the ``r = +ell``
row.  The recursion solution satisfies the column rule automatically (its
top row is a Perron vector).
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import scipy.linalg

from . import io
from .cell import CellSpec, angular_operators
from .numerics import ConvergenceError, mat_exp

MAX_DIM = 4096
EDGE_TOL = 1e-14
PHASE_EDGE_TOL = 1e-3

# max |entry| outside the circle of radius 1.15 ell at ell = 53/2, measured on
# the cross-validated matrix.  Measured value 7.58e-3.
SUPPORT_THRESHOLD_53_2 = 1e-2


@dataclass(frozen=True)
class BridgeMatrix:
    ell: Fraction
    entries: np.ndarray = field(repr=False)
    phase_convention: str = "real_positive_edge"

    @property
    def dim(self) -> int:
        return len(self.entries)

    @property
    def labels(self) -> np.ndarray:
        return np.arange(self.dim) - float(self.ell)


def _check_ell(ell) -> Fraction:
    ell = Fraction(ell)
    if ell <= 0 or (2 * ell).denominator != 1:
        raise ValueError(f"ell must be a positive half-integer, got {ell}")
    if 2 * ell + 1 > MAX_DIM:
        raise ValueError(f"2 ell + 1 = {2 * ell + 1} exceeds {MAX_DIM}")
    return ell


def recursion_offdiagonal(ell) -> np.ndarray:
    """Couplings ``sqrt((ell+1-s)(ell+s))`` between ``s-1`` and ``s``."""
    ell = Fraction(ell)
    # 2s is an integer; (ell+1-s)(ell+s) computed exactly then rooted
    s = [Fraction(-ell) + j for j in range(1, int(2 * ell) + 1)]
    return np.sqrt(np.array([float((ell + 1 - si) * (ell + si)) for si in s]))


def _fix_row_signs(m: np.ndarray) -> np.ndarray:
    m = m.copy()
    for i, row in enumerate(m):
        j = len(row) - 1 if abs(row[-1]) >= EDGE_TOL else int(np.argmax(np.abs(row)))
        if row[j] < 0:
            m[i] = -row
    return m


def bridge_by_recursion(ell) -> BridgeMatrix:
    ell = _check_ell(ell)
    dim = int(2 * ell + 1)
    off = recursion_offdiagonal(ell)
    try:
        w, v = scipy.linalg.eigh_tridiagonal(np.zeros(dim), off)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(str(exc)) from exc
    expected = 2 * (np.arange(dim) - float(ell))
    if np.max(np.abs(w - expected)) > 1e-8 * max(1.0, float(ell)):
        raise ConvergenceError("tridiagonal spectrum is not {2r}")
    rows = v.T
    norms = np.linalg.norm(rows, axis=1)
    if np.any(norms < 0.5):
        raise ConvergenceError("degenerate row normalisation")
    rows = rows / norms[:, None]
    return BridgeMatrix(ell, _fix_row_signs(rows))


def align_phases(m: np.ndarray, tol: float = PHASE_EDGE_TOL) -> tuple[np.ndarray, float]:
    """Find diagonal phases ``a, b`` with ``diag(a) m diag(b)`` real.

    Phases are propagated along entries with modulus above ``tol`` starting
    from the largest one.  Returns the real matrix with the sign convention
    applied and the largest imaginary residue left over.
    """
    mag = np.abs(m)
    ang = np.angle(m)
    nr, nc = m.shape
    alpha = np.full(nr, np.nan)
    beta = np.full(nc, np.nan)
    i0, _ = np.unravel_index(np.argmax(mag), mag.shape)
    alpha[i0] = 0.0
    stack = [(0, i0)]
    while stack:
        kind, i = stack.pop()
        if kind == 0:
            for j in np.nonzero(mag[i] > tol)[0]:
                if np.isnan(beta[j]):
                    beta[j] = ang[i, j] - alpha[i]
                    stack.append((1, j))
        else:
            for k in np.nonzero(mag[:, i] > tol)[0]:
                if np.isnan(alpha[k]):
                    alpha[k] = ang[k, i] - beta[i]
                    stack.append((0, k))
    if np.isnan(alpha).any() or np.isnan(beta).any():
        raise ValueError("phase graph is disconnected at this tolerance")
    aligned = np.exp(-1j * alpha)[:, None] * m * np.exp(-1j * beta)[None, :]
    residue = float(np.max(np.abs(aligned.imag)))
    real = aligned.real
    top = real[-1]
    real = real * np.where(top < 0, -1.0, 1.0)[None, :]
    return _fix_row_signs(real), residue


def rotation_exponential(ell) -> np.ndarray:
    """``exp(i pi L1 / 2)`` in the ``L3`` eigenbasis, ``m`` increasing."""
    ell = _check_ell(ell)
    ops = angular_operators(CellSpec.from_ell(ell))
    return mat_exp(ops.L1, 0.5j * np.pi)


def bridge_by_rotation(ell) -> BridgeMatrix:
    ell = _check_ell(ell)
    real, residue = align_phases(rotation_exponential(ell))
    if residue > 1e-8:
        raise ConvergenceError(f"rotation matrix not reducible to real form (residue {residue:.2e})")
    return BridgeMatrix(ell, real)


def support_profile(b: BridgeMatrix, radius_factor: float) -> float:
    """Largest ``|entry|`` with ``m^2 + m'^2 > (radius_factor * ell)^2``."""
    if not radius_factor >= 1:
        raise ValueError(f"radius_factor must be >= 1, got {radius_factor}")
    m = b.labels
    outside = m[:, None] ** 2 + m[None, :] ** 2 > (radius_factor * float(b.ell)) ** 2
    if not outside.any():
        return 0.0
    return float(np.max(np.abs(b.entries[outside])))


def render_bridge(b: BridgeMatrix, path) -> bytes:
    """Write a P5 image, black for the largest entry, row ``r = +ell`` on top."""
    img = io.grayscale(b.entries[::-1], invert=True)
    return io.write_pgm(path, img)


def write_bridge_csv(b: BridgeMatrix, path) -> None:
    labels = [str(Fraction(int(2 * x), 2)) for x in b.labels]
    with io.open_text(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["r", "s", "value"])
        for i, r in enumerate(labels):
            for j, s in enumerate(labels):
                w.writerow([r, s, io.fmt(b.entries[i, j])])
