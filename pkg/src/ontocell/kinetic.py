"""The beable ``y = {x / v(p)}`` for a Hamiltonian ``H = T(p)``.

``{.}`` is the symmetrised product, ``{a b} = (ab + ba)/2``.  With
``v = dT/dp`` one has ``i [T, y] = 1``, so ``y`` advances at unit speed.
The kernel between position and ``y`` eigenstates is

    <x|y> = (1/2 pi) int dp sqrt(v(p)) exp(i (x p - y T(p))).

Discretisation: ``p`` is sampled uniformly on ``[p_min, p_max]``.  The
operator construction uses the conjugate periodic x-grid of the same size
(``dx = 2 pi / (M dp)``, centred), so ``p`` lives on a wrapped window of a
discrete Fourier pair.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np


class UnitarityWarning(UserWarning):
    """``T`` is not invertible on the grid; kernel unitarity is not claimed."""


def _uniform(grid, name: str) -> float:
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or len(grid) < 2:
        raise ValueError(f"{name} needs at least two samples")
    step = np.diff(grid)
    if not np.allclose(step, step[0], rtol=1e-9, atol=0) or step[0] <= 0:
        raise ValueError(f"{name} must be uniformly increasing")
    return float(step[0])


@dataclass(frozen=True)
class KineticSpec:
    p_grid: np.ndarray = field(repr=False)
    T_values: np.ndarray = field(repr=False)
    v_values: np.ndarray = field(repr=False)
    name: str = "custom"

    def __post_init__(self):
        # extended-precision samples are kept as given, anything else is float64
        raw = [np.asarray(a) for a in (self.p_grid, self.T_values, self.v_values)]
        dt = np.longdouble if any(a.dtype == np.longdouble for a in raw) else np.float64
        p, t, v = (a.astype(dt) for a in raw)
        if not (p.shape == t.shape == v.shape):
            raise ValueError("p, T and v need the same number of samples")
        _uniform(p, "p_grid")
        if np.any(v == 0) or (np.any(v > 0) and np.any(v < 0)):
            raise ValueError("v(p) = dT/dp must keep one sign over the grid")
        for key, val in (("p_grid", p), ("T_values", t), ("v_values", v)):
            object.__setattr__(self, key, val)

    @property
    def M(self) -> int:
        return len(self.p_grid)

    @property
    def dp(self) -> float:
        return float(self.p_grid[1] - self.p_grid[0])

    @property
    def sign(self) -> int:
        """Global sign of ``v``; ``sqrt(v)`` is taken of ``sign * v``."""
        return 1 if self.v_values[0] > 0 else -1

    @property
    def monotone(self) -> bool:
        return bool(np.all(self.sign * np.diff(self.T_values) > 0))


def linear(M: int, p_min: float = -math.pi, p_max: float = math.pi, c: float = 1.0,
           dtype=np.float64) -> KineticSpec:
    p = np.linspace(dtype(p_min), dtype(p_max), M, dtype=dtype)
    return KineticSpec(p, dtype(c) * p, np.full(M, dtype(c)), "linear")


def quadratic_positive(M: int, p_min: float = 0.5, p_max: float = 8.0, dtype=np.float64) -> KineticSpec:
    """``T = p^2 / 2`` on a window with ``p > 0``."""
    p = np.linspace(dtype(p_min), dtype(p_max), M, dtype=dtype)
    return KineticSpec(p, p**2 / 2, p.copy(), "quadratic-positive")


def from_samples(p, T, v=None, name: str = "custom") -> KineticSpec:
    """Custom samples; ``v`` defaults to second-order central differences."""
    p = np.asarray(p, dtype=float)
    T = np.asarray(T, dtype=float)
    if v is None:
        v = np.gradient(T, p, edge_order=2)
    return KineticSpec(p, T, v, name)


PRESETS = {"linear": linear, "quadratic-positive": quadratic_positive}


def trapezoid_weights(n: int, step: float) -> np.ndarray:
    w = np.full(n, step)
    w[0] = w[-1] = step / 2
    return w


def kernel_grids(spec: KineticSpec, n_y: int = 64):
    """x-lattice dual to the p-step and y-lattice dual to the range of ``T``."""
    n = spec.M - 1
    dx = 2 * math.pi / (n * spec.dp)
    x = (np.arange(n) - n // 2) * dx
    spread = float(abs(spec.T_values[-1] - spec.T_values[0]))
    dy = 2 * math.pi / spread
    y = (np.arange(n_y) - n_y // 2) * dy
    return x, y


def beable_kernel(spec: KineticSpec, x_grid, y_grid) -> np.ndarray:
    """``K[i, j] ~ <x_i|y_j>`` times ``sqrt(dx dy)``, trapezoid in ``p``.

    The measure factor makes ``K`` a matrix between orthonormal lattice
    states, so ``K^dagger K`` is the quantity to compare with the identity.
    """
    dx = _uniform(x_grid, "x_grid")
    dy = _uniform(y_grid, "y_grid")
    if not spec.monotone:
        warnings.warn("T(p) is not strictly monotone; the kernel is not unitary", UnitarityWarning, stacklevel=2)
    x = np.asarray(x_grid, dtype=float)
    y = np.asarray(y_grid, dtype=float)
    w = trapezoid_weights(spec.M, spec.dp) * np.sqrt(spec.sign * spec.v_values)
    left = np.exp(1j * np.outer(x, spec.p_grid)) * w[None, :]
    right = np.exp(-1j * np.outer(spec.T_values, y))
    return math.sqrt(dx * dy) / (2 * math.pi) * (left @ right)


def gram_deviation(k: np.ndarray) -> float:
    g = k.conj().T @ k
    return float(np.max(np.abs(g - np.eye(len(g)))))


def participation_ratio(k: np.ndarray) -> np.ndarray:
    """Per-row ``(sum |K|^2)^2 / sum |K|^4``: how many ``y`` a row spreads over."""
    a = np.abs(k) ** 2
    return np.sum(a, axis=1) ** 2 / np.sum(a**2, axis=1)


def effective_support(spec: KineticSpec) -> dict:
    """Range of ``T`` seen by the grid and the ``y`` resolution it supports.

    When ``T`` is invertible only on part of the line, ``y`` is dual to this
    range rather than to the whole real axis.  Reported, not enforced.
    """
    lo, hi = float(np.min(spec.T_values)), float(np.max(spec.T_values))
    return {
        "T_min": lo,
        "T_max": hi,
        "y_step": 2 * math.pi / (hi - lo),
        "monotone": spec.monotone,
        "sign": spec.sign,
    }


def conjugate_grid(spec: KineticSpec, dtype=np.float64):
    """Centred x-grid of ``M`` points with ``dx = 2 pi / (M dp)``."""
    m = spec.M
    dp = dtype(spec.p_grid[-1] - spec.p_grid[0]) / dtype(m - 1)
    dx = dtype(2) * _pi(dtype) / (dtype(m) * dp)
    return (np.arange(m) - m // 2).astype(dtype) * dx, dx


def _pi(dtype):
    return dtype("3.14159265358979323846264338327950288") if dtype is np.longdouble else dtype(math.pi)


def _complex(dtype):
    return np.clongdouble if dtype is np.longdouble else np.complex128


def fourier_pair(spec: KineticSpec) -> np.ndarray:
    """``W[j, k] = exp(i p_k x_j) / sqrt(M)``: momentum to position amplitudes."""
    x, _ = conjugate_grid(spec)
    return np.exp(1j * np.outer(x, spec.p_grid)) / math.sqrt(spec.M)


def position_in_momentum_basis(spec: KineticSpec, dtype=np.float64) -> np.ndarray:
    """``W^dagger diag(x) W`` in closed form.

    The matrix is circulant in ``d = k' - k``: ``-dx/2`` on the diagonal and
    ``dx (-1)^d (-1/2 - (i/2) cot(pi d / M))`` elsewhere.  The closed form
    keeps full relative accuracy in the small far-off-diagonal entries.
    """
    m = spec.M
    if m % 2:
        raise ValueError(f"the closed form needs an even number of samples, got {m}")
    _, dx = conjugate_grid(spec, dtype)
    k = np.arange(m)
    d = k[None, :] - k[:, None]
    safe = np.where(d == 0, 1, d).astype(dtype)
    cot = 1 / np.tan(_pi(dtype) * safe / dtype(m))
    parity = np.where(d % 2 == 0, 1, -1).astype(dtype)
    out = dx * parity * (dtype(-0.5) - 0.5j * cot.astype(_complex(dtype)))
    out[d == 0] = -dx / 2
    return out


def beable_operator(spec: KineticSpec) -> np.ndarray:
    """``y = {x / v(p)}`` in the position basis of :func:`conjugate_grid`."""
    x, _ = conjugate_grid(spec)
    v = spec.v_values
    if np.all(v == v[0]):
        # commuting factors: exactly x / v
        return np.diag(x / v[0]).astype(complex)
    w = fourier_pair(spec)
    inv_v = (w * (1 / v)[None, :]) @ w.conj().T
    xm = np.diag(x).astype(complex)
    return 0.5 * (xm @ inv_v + inv_v @ xm)


def inverse_position(spec: KineticSpec, y: np.ndarray) -> np.ndarray:
    """``{y v(p)}``, which gives back ``x`` when ``v`` is constant."""
    v = spec.v_values
    if np.all(v == v[0]):
        return y * v[0]
    w = fourier_pair(spec)
    vm = (w * v[None, :]) @ w.conj().T
    return 0.5 * (y @ vm + vm @ y)


def packet_width(spec: KineticSpec) -> float:
    """Momentum width balancing p-window and x-window tails, ``P / (2 sqrt(pi M))``."""
    span = float(spec.p_grid[-1] - spec.p_grid[0])
    return span / (2 * math.sqrt(math.pi * spec.M))


def drift_check(spec: KineticSpec, dtype=np.float64) -> float:
    """Largest ``|| (i [T, y] - 1) psi ||`` over interior test packets.

    The packets are unit Gaussians of width :func:`packet_width` centred on
    every grid point with ``|x| <= L_x / 4`` and carried at the centre of the
    momentum window, so none of them reaches the wrap-around seam.  Computed
    in the momentum basis, where ``T`` and ``1/v`` are diagonal; ``dtype``
    may be ``np.longdouble`` to lower the roundoff floor.
    """
    cdt = _complex(dtype)
    p = np.asarray(spec.p_grid, dtype=dtype)
    t = np.asarray(spec.T_values, dtype=dtype)
    inv_v = 1 / np.asarray(spec.v_values, dtype=dtype)
    x, dx = conjugate_grid(spec, dtype)
    xp = position_in_momentum_basis(spec, dtype)
    g = 1j * (t[:, None] - t[None, :]) * xp
    c = 0.5 * (g * inv_v[None, :] + inv_v[:, None] * g)
    dev = c - np.eye(spec.M, dtype=dtype)
    half_width = dtype(spec.M) * dx / 4
    centres = x[np.abs(x) <= half_width]
    sigma = dtype(packet_width(spec))
    carrier = (p[0] + p[-1]) / 2
    envelope = np.exp(-((p - carrier) ** 2) / (4 * sigma**2))
    packets = envelope[:, None] * np.exp(-1j * np.outer(p, centres).astype(cdt))
    packets = packets / np.sqrt(np.sum(np.abs(packets) ** 2, axis=0))[None, :]
    res = dev @ packets
    return float(np.max(np.sqrt(np.sum(np.abs(res) ** 2, axis=0))))


def interior_row_deviation(spec: KineticSpec) -> float:
    """Entrywise ``max |i [T, y] - 1|`` over rows with ``|x| <= L_x / 4``.

    Diagnostic only: with a spectral ``p`` the commutator has O(1)
    alternating off-diagonal entries, so this does not shrink with ``M``.
    """
    x, _ = conjugate_grid(spec)
    w = fourier_pair(spec)
    tm = (w * spec.T_values[None, :]) @ w.conj().T
    y = beable_operator(spec)
    c = 1j * (tm @ y - y @ tm)
    rows = np.abs(x) <= spec.M * (x[1] - x[0]) / 4
    return float(np.max(np.abs((c - np.eye(spec.M))[rows])))
