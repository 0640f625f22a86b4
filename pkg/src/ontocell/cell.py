"""A single periodic ontological cell.

A cell has ``N = 2*ell + 1`` ontological states ``|k>`` that advance one step
per time step ``delta_t``.  Its quantum description lives in three bases:

* ontological ``|k>``, where the one-step evolution is a cyclic shift;
* energy ``|n>``, where ``H = diag(n * omega)``;
* the angular-momentum picture, ``n = m + ell`` with ``H = omega (L3 + ell)``.

Conventions
-----------
``fourier_matrix`` has entries ``F[k, n] = exp(2 pi i n k / N) / sqrt(N)``;
column ``n`` holds the ontological components of ``|n>``.  Hence
``F^dagger U F = diag(exp(-2 pi i n / N))`` and ``F^dagger`` maps
ontological amplitudes to energy amplitudes.  The matrix is symmetric, so
``F[n, k]`` reads the same.

``S_plus`` raises the energy label, ``S_plus |n> = |n+1 mod N>``.  With the
Fourier signs above this makes it diagonal in the ontological basis with
entries ``exp(+2 pi i k / N)``, and ``L_plus = sqrt((n+1)(2 ell - n)) S_plus``.

Energy-basis matrices are indexed by ``n = 0 .. N-1`` in increasing order,
so raising operators sit on the first sub-diagonal (``[n+1, n]``).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .numerics import Basis, dagger


@dataclass(frozen=True)
class CellSpec:
    """Period ``N`` and time step ``delta_t``; ``omega`` is derived."""

    N: int
    delta_t: float = 1.0

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 1:
            raise ValueError(f"N must be a positive integer, got {self.N!r}")
        if not self.delta_t > 0:
            raise ValueError(f"delta_t must be positive, got {self.delta_t!r}")
        object.__setattr__(self, "N", int(self.N))

    @property
    def ell(self) -> Fraction:
        return Fraction(self.N - 1, 2)

    @property
    def period(self) -> float:
        return self.N * self.delta_t

    @property
    def omega(self) -> float:
        return 2 * math.pi / (self.N * self.delta_t)

    @classmethod
    def from_ell(cls, ell, delta_t: float = 1.0) -> "CellSpec":
        ell = Fraction(ell)
        if ell < 0 or (2 * ell).denominator != 1:
            raise ValueError(f"ell must be a non-negative half-integer, got {ell}")
        return cls(int(2 * ell + 1), delta_t)


@dataclass(frozen=True)
class CellState:
    k: int

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 0:
            raise ValueError(f"k must be a non-negative integer, got {self.k!r}")


@dataclass(frozen=True)
class BoxState:
    k_tilde: int
    sigma: int

    def __post_init__(self):
        if int(self.k_tilde) != self.k_tilde or self.k_tilde < 0:
            raise ValueError(f"k_tilde must be a non-negative integer, got {self.k_tilde!r}")
        if self.sigma not in (-1, 1):
            raise ValueError(f"sigma must be +1 or -1, got {self.sigma!r}")


def _require_ladder(spec: CellSpec):
    if spec.N < 2:
        raise ValueError("N = 1 has no ladder operators")


def _check_sign(sign: int):
    if sign not in (-1, 1):
        raise ValueError(f"sign must be +1 or -1, got {sign!r}")


def _in_basis(energy_matrix: np.ndarray, spec: CellSpec, basis: Basis) -> np.ndarray:
    basis = Basis(basis)
    if basis is Basis.ENERGY:
        return energy_matrix
    if basis is Basis.ONTOLOGICAL:
        f = fourier_matrix(spec)
        return f @ energy_matrix @ dagger(f)
    raise ValueError(f"cell operators are available in the energy or ontological basis, not {basis.value}")


def shift_operator(spec: CellSpec) -> np.ndarray:
    """One-step evolution ``|k> -> |k+1 mod N>`` in the ontological basis."""
    n = spec.N
    u = np.zeros((n, n), dtype=complex)
    u[(np.arange(n) + 1) % n, np.arange(n)] = 1.0
    return u


def fourier_matrix(spec: CellSpec) -> np.ndarray:
    n = spec.N
    idx = np.arange(n)
    return np.exp(2j * np.pi * np.outer(idx, idx) / n) / math.sqrt(n)


def energy_levels(spec: CellSpec, ground_offset: bool = False) -> np.ndarray:
    levels = np.arange(spec.N) * spec.omega
    if ground_offset:
        levels = levels + 0.5 * spec.omega
    return levels


def hamiltonian(spec: CellSpec, basis: Basis = Basis.ONTOLOGICAL, ground_offset: bool = False) -> np.ndarray:
    """``H`` with spectrum ``n * omega`` (plus ``omega/2`` if ``ground_offset``).

    Without the offset, ``exp(-i H delta_t)`` is exactly the shift operator.
    """
    h = np.diag(energy_levels(spec, ground_offset)).astype(complex)
    return _in_basis(h, spec, basis)


def beable_S(spec: CellSpec, sign: int, basis: Basis = Basis.ONTOLOGICAL) -> np.ndarray:
    _check_sign(sign)
    n = spec.N
    h = np.zeros((n, n), dtype=complex)
    h[(np.arange(n) + sign) % n, np.arange(n)] = 1.0
    if Basis(basis) is Basis.ONTOLOGICAL:
        # diagonal exactly, no Fourier round trip
        return np.diag(np.exp(sign * 2j * np.pi * np.arange(n) / n))
    return _in_basis(h, spec, basis)


def ladder_coefficients(spec: CellSpec) -> np.ndarray:
    """``sqrt((n+1)(2 ell - n))`` for ``n = 0 .. N-1``; the last one is 0."""
    two_ell = spec.N - 1
    n = np.arange(spec.N)
    return np.sqrt((n + 1) * (two_ell - n).astype(float))


@dataclass(frozen=True)
class AngularOperators:
    L1: np.ndarray
    L2: np.ndarray
    L3: np.ndarray
    Lplus: np.ndarray
    Lminus: np.ndarray


def angular_operators(spec: CellSpec, basis: Basis = Basis.ENERGY) -> AngularOperators:
    _require_ladder(spec)
    n = spec.N
    ell = float(spec.ell)
    coeff = ladder_coefficients(spec)
    assert coeff[-1] == 0.0  # no wrap from the top state back to n = 0
    lp = np.zeros((n, n), dtype=complex)
    lp[np.arange(1, n), np.arange(n - 1)] = coeff[:-1]
    lm = dagger(lp)
    l3 = np.diag(np.arange(n) - ell).astype(complex)
    l1 = 0.5 * (lp + lm)
    l2 = (lp - lm) / 2j
    return AngularOperators(*(_in_basis(op, spec, basis) for op in (l1, l2, l3, lp, lm)))


def xp_operators(spec: CellSpec, basis: Basis = Basis.ENERGY) -> tuple[np.ndarray, np.ndarray]:
    """``(x, p)`` with ``L1 = p sqrt(ell)`` and ``L2 = x sqrt(ell)``."""
    ops = angular_operators(spec, basis)
    root = math.sqrt(float(spec.ell))
    return ops.L2 / root, ops.L1 / root


def ont_phase_operator(spec: CellSpec, sign: int, basis: Basis = Basis.ONTOLOGICAL) -> np.ndarray:
    """``exp(sign * i phi)`` at finite N: the cyclic energy shift ``S_sign``."""
    _require_ladder(spec)
    return beable_S(spec, sign, basis)


def phase_approximant(spec: CellSpec) -> np.ndarray:
    """Finite-N stand-in for ``(H/omega)^(-1/2) a^dagger`` in the energy basis.

    ``a^dagger`` is taken as ``L_plus / sqrt(2 ell)``.  The inverse square root
    only ever acts on raised states (``n >= 1``), so no zero is inverted.  The
    sub-diagonal entries are ``sqrt((2 ell - n) / (2 ell))`` and tend to 1 as
    ``ell`` grows at fixed ``n``.
    """
    _require_ladder(spec)
    n = spec.N
    lp = angular_operators(spec).Lplus / math.sqrt(2 * float(spec.ell))
    inv_root = np.zeros(n)
    inv_root[1:] = 1.0 / np.sqrt(np.arange(1, n))
    return inv_root[:, None] * lp


def box_fold(ell, state: BoxState) -> CellState:
    """``k = ell + sigma (k_tilde - ell)``.

    ``(ell, +1)`` and ``(ell, -1)`` are the same point; every other pair maps
    to a distinct ``k`` in ``[0, 2 ell]``.
    """
    ell = Fraction(ell)
    if ell.denominator != 1:
        raise ValueError(f"the box construction needs integer ell, got {ell}")
    ell = int(ell)
    if state.k_tilde > ell:
        raise ValueError(f"k_tilde={state.k_tilde} outside [0, {ell}]")
    return CellState(ell + state.sigma * (state.k_tilde - ell))


def box_unfold(ell, state: CellState) -> BoxState:
    ell = Fraction(ell)
    if ell.denominator != 1:
        raise ValueError(f"the box construction needs integer ell, got {ell}")
    ell = int(ell)
    if state.k > 2 * ell:
        raise ValueError(f"k={state.k} outside [0, {2 * ell}]")
    if state.k <= ell:
        return BoxState(state.k, +1)
    return BoxState(2 * ell - state.k, -1)


def energy_wavefunction_powers(spec: CellSpec, n: int) -> np.ndarray:
    """Expand the time dependence of ``|n>`` in powers of ``z = exp(-i phi)``.

    The amplitude ``<n| U^j |n>`` is sampled over one period (``phi_j =
    2 pi j / N``) and projected onto the monomials ``z_j^q``, ``q = 0..N-1``.
    Returns the coefficient vector indexed by the power ``q``.
    """
    if not 0 <= n < spec.N:
        raise ValueError(f"n={n} outside [0, {spec.N - 1}]")
    size = spec.N
    f = fourier_matrix(spec)
    u = shift_operator(spec)
    state = f[:, n]
    amps = np.empty(size, dtype=complex)
    current = state.copy()
    for j in range(size):
        amps[j] = np.vdot(state, current)
        current = u @ current
    j = np.arange(size)
    z = np.exp(-2j * np.pi * j / size)
    powers = z[:, None] ** np.arange(size)[None, :]
    return (dagger(powers) @ amps) / size
