"""Two-variable torus model with partial exchange walls.

Classical side: a point ``(x, y)`` on ``[0, L) x [0, 1)`` moves with velocity
``(1, 1)``.  The lines ``x = 0`` and ``x = A`` are walls; a crossing at a
height ``y mod 1`` in ``[0, alpha)`` sends the point to the other wall, so it
stays in the region it came from.  ``alpha = 1`` confines every orbit to
``[0, A]`` or ``[A, L]``; ``alpha = 0`` is free flight.

Quantum side: boundary traces are expanded in modes ``exp(2 pi i n y)``,
``n >= 0``.  In the combinations ``psi1 = psi0 + psiA`` and
``psi2 = psi0 - psiA`` the wall leaves ``psi1`` alone and multiplies ``psi2``
by ``sign(y - alpha)``.  Vectors over modes are ordered
``[psi0_0 .. psi0_nmax, psiA_0 .. psiA_nmax]``.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

import numpy as np

EVENT_TOL = 1e-12
GL_NODES = 8


@dataclass(frozen=True)
class SieveModelConfig:
    L: float
    A: float
    alpha: float
    n_max: int = 8

    def __post_init__(self):
        if not 0 < self.A < self.L:
            raise ValueError(f"need 0 < A < L, got A={self.A}, L={self.L}")
        if not 0 <= self.alpha <= 1:
            raise ValueError(f"alpha must lie in [0, 1], got {self.alpha}")
        if int(self.n_max) != self.n_max or self.n_max < 0:
            raise ValueError(f"n_max must be a non-negative integer, got {self.n_max}")

    @property
    def exact(self) -> bool:
        return all(isinstance(v, Rational) for v in (self.L, self.A, self.alpha))


@dataclass(frozen=True)
class ClassicalPoint:
    x: float
    y: float

    def normalized(self, L) -> "ClassicalPoint":
        return ClassicalPoint(self.x % L, self.y % 1)


@dataclass(frozen=True)
class WallEvent:
    time: float
    wall: str  # "0" or "A"
    y: float
    exchanged: bool


@dataclass(frozen=True)
class Orbit:
    events: tuple
    end: ClassicalPoint
    reverse: bool = False


def _coerce(value, exact: bool):
    return Fraction(value) if exact else float(value)


def _forward_land(cfg, region: int, y):
    """Where a point arriving at the upper wall of ``region`` continues."""
    exch = (y % 1) < cfg.alpha
    if region == 0:  # arrived at x = A
        return ((0, 0) if exch else (cfg.A, 1)), exch
    return ((cfg.A, 1) if exch else (0, 0)), exch  # arrived at x = L


def _reverse_land(cfg, region: int, y):
    """Undo :func:`_forward_land` for a point at the lower wall of ``region``."""
    exch = (y % 1) < cfg.alpha
    if region == 0:  # at x = 0
        return ((cfg.A, 0) if exch else (cfg.L, 1)), exch
    return ((cfg.L, 1) if exch else (cfg.A, 0)), exch  # at x = A


def _on_wall(cfg, x, tol) -> bool:
    return abs(x) <= tol or abs(x - cfg.A) <= tol or abs(x - cfg.L) <= tol


def classical_orbit(cfg: SieveModelConfig, start: ClassicalPoint, t_end, reverse: bool = False) -> Orbit:
    """Exact event-driven flow for time ``t_end`` (backwards if ``reverse``).

    A point exactly on a wall counts as having already passed it.  With
    rational ``L, A, alpha``, start and ``t_end`` all arithmetic is exact.
    ``classical_orbit(cfg, orbit.end, t, reverse=True).end`` recovers the
    start.  Event times are measured from the start of the call.
    """
    if t_end < 0:
        raise ValueError(f"t_end must be non-negative, got {t_end}")
    exact = cfg.exact and all(isinstance(v, Rational) for v in (start.x, start.y, t_end))
    tol = 0 if exact else EVENT_TOL
    L, A, alpha = (_coerce(v, exact) for v in (cfg.L, cfg.A, cfg.alpha))
    cfg = SieveModelConfig(L, A, alpha, cfg.n_max)
    x, y = _coerce(start.x, exact) % L, _coerce(start.y, exact) % 1
    if _on_wall(cfg, x, tol) and abs(y - alpha) <= tol:
        raise ValueError(
            f"start ({x}, {y}) sits on a wall at the exchange threshold y = alpha; "
            "its continuation is ambiguous"
        )
    region = 0 if x < A - tol else 1
    if region == 1 and abs(x - A) <= tol:
        x = A
    remaining = _coerce(t_end, exact)
    elapsed = _coerce(0, exact)
    events = []
    if not reverse:
        while True:
            hi = A if region == 0 else L
            dist = hi - x
            if dist > remaining + tol:
                x, y = x + remaining, y + remaining
                break
            dist = max(dist, 0 * dist)
            y += dist
            elapsed += dist
            remaining = max(remaining - dist, 0 * remaining)
            (x, region), exch = _forward_land(cfg, region, y)
            events.append(WallEvent(elapsed, "A" if hi == A else "0", y % 1, bool(exch)))
    else:
        while True:
            lo = 0 if region == 0 else A
            dist = x - lo
            if dist < remaining - tol:
                y -= dist
                elapsed += dist
                remaining -= dist
                (x, region), exch = _reverse_land(cfg, region, y)
                events.append(WallEvent(elapsed, "0" if lo == 0 else "A", y % 1, bool(exch)))
                continue
            x, y = x - remaining, y - remaining
            hi = A if region == 0 else L
            if abs(x - lo) <= tol:
                x = lo
            if abs(hi - x) <= tol:
                # sitting on the incoming side of a wall: normalise forward
                (x, region), _ = _forward_land(cfg, region, y)
            break
    return Orbit(tuple(events), ClassicalPoint(x % L, y % 1), reverse)


def first_return(cfg: SieveModelConfig, start: ClassicalPoint, horizon, tol: float = 1e-6):
    """Earliest ``t`` in ``(0, horizon]`` with the orbit within ``tol`` of start.

    Each free-flight segment is a straight line, so it is checked in closed
    form.  Returns ``None`` if there is no return within the horizon.
    """
    orbit = classical_orbit(cfg, start, horizon)
    xs, ys = float(start.x) % float(cfg.L), float(start.y) % 1
    A, L = float(cfg.A), float(cfg.L)
    x0, y0, t0 = xs, ys, 0.0
    region = 0 if x0 < A else 1
    start_region = region
    segments = []
    for ev in orbit.events:
        t = float(ev.time)
        segments.append((t0, t, x0, y0, region))
        if region == 0:
            x0, region = (0.0, 0) if ev.exchanged else (A, 1)
        else:
            x0, region = (A, 1) if ev.exchanged else (0.0, 0)
        y0, t0 = float(ev.y), t
    segments.append((t0, float(horizon), x0, y0, region))
    for a, b, x0, y0, reg in segments:
        if reg != start_region:
            continue
        s = xs - x0
        if s < -tol or a + s > b + tol:
            continue
        s = max(s, 0.0)
        if a + s <= tol:
            continue
        dy = (y0 + s - ys + 0.5) % 1 - 0.5
        if abs(dy) <= tol:
            return a + s
    return None


# -- quantum side ------------------------------------------------------------


def _phase(l: int, alpha) -> complex:
    """``exp(2 pi i l alpha)``, exact at integer ``l * alpha``."""
    frac = (l * alpha) % 1
    if frac == 0:
        return 1.0 + 0j
    if frac == Fraction(1, 2):
        return -1.0 + 0j
    return cmath.exp(2j * math.pi * float(frac))


def sign_integral(l: int, alpha) -> complex:
    """``int_0^1 exp(2 pi i l y) sign(y - alpha) dy``."""
    if l == 0:
        return complex(1 - 2 * alpha)
    return (-1j / (math.pi * l)) * (1 - _phase(l, alpha))


def scattering_map(cfg: SieveModelConfig) -> np.ndarray:
    """Incoming traces ``(psi0-, psiA-)`` to outgoing ``(psi0+, psiA+)``.

    Mode ``m`` feeds mode ``k`` through ``c = sign_integral(m - k) / 2`` acting
    on ``psi0- - psiA-``; for ``k = m`` this reduces to the blocks
    ``[[1 - alpha, alpha], [alpha, 1 - alpha]]``.  Modes outside
    ``[0, n_max]`` are dropped.
    """
    size = cfg.n_max + 1
    c = np.empty((size, size), dtype=complex)
    for k in range(size):
        for m in range(size):
            c[k, m] = sign_integral(m - k, cfg.alpha) / 2
    half = 0.5 * np.eye(size)
    same, cross = half + c, half - c
    # set the mode-diagonal directly so it is exact for rational alpha
    idx = np.arange(size)
    same[idx, idx] = float(1 - cfg.alpha)
    cross[idx, idx] = float(cfg.alpha)
    return np.block([[same, cross], [cross, same]])


def wall_rule(psi0, psiA, y, alpha):
    """Pointwise wall action on traces sampled at heights ``y``."""
    psi0 = np.asarray(psi0, dtype=complex)
    psiA = np.asarray(psiA, dtype=complex)
    s = np.where(np.asarray(y) % 1 < alpha, -1.0, 1.0)
    one = psi0 + psiA
    two = s * (psi0 - psiA)
    return (one + two) / 2, (one - two) / 2


def y_quadrature(y_samples: int, alpha, nodes: int = GL_NODES):
    """Gauss-Legendre nodes on ``y_samples`` equal cells, split at ``alpha``.

    The wall rule is discontinuous only at ``alpha``, so splitting the cell
    that contains it makes every sub-cell integrand smooth.
    """
    edges = np.linspace(0.0, 1.0, y_samples + 1)
    a = float(alpha)
    if 0 < a < 1 and not np.any(np.isclose(edges, a, rtol=0, atol=1e-15)):
        edges = np.sort(np.append(edges, a))
    t, w = np.polynomial.legendre.leggauss(nodes)
    lo, hi = edges[:-1, None], edges[1:, None]
    half = (hi - lo) / 2
    y = (lo + hi) / 2 + half * t[None, :]
    wy = half * w[None, :]
    return y.ravel(), wy.ravel()


def brute_force_scattering(cfg: SieveModelConfig, y_samples: int) -> np.ndarray:
    """Oracle for :func:`scattering_map` built on the pointwise wall rule.

    Each incoming mode is sampled on the split quadrature grid, passed
    through :func:`wall_rule`, and projected onto every frequency of the
    window ``[-y_samples/2, y_samples/2)``; rows are then cut to ``[0, n_max]``.
    """
    if y_samples < 4 * max(cfg.n_max, 1) or y_samples & (y_samples - 1):
        raise ValueError(f"y_samples must be a power of two >= 4 n_max, got {y_samples}")
    y, w = y_quadrature(y_samples, cfg.alpha)
    size = cfg.n_max + 1
    window = np.arange(-y_samples // 2, y_samples // 2)
    analysis = np.exp(-2j * np.pi * np.outer(window, y)) * w[None, :]
    keep = (window >= 0) & (window <= cfg.n_max)
    out = np.zeros((2 * size, 2 * size), dtype=complex)
    zero = np.zeros_like(y, dtype=complex)
    for m in range(size):
        wave = np.exp(2j * np.pi * m * y)
        for side in (0, 1):
            inc = (wave, zero) if side == 0 else (zero, wave)
            o0, oA = wall_rule(*inc, y, float(cfg.alpha))
            col = side * size + m
            out[:size, col] = (analysis @ o0)[keep]
            out[size:, col] = (analysis @ oA)[keep]
    return out


def trace_norm(psi0, psiA, weights) -> float:
    return float(np.sum(weights * (np.abs(psi0) ** 2 + np.abs(psiA) ** 2)))


def norm_deficit(cfg: SieveModelConfig) -> np.ndarray:
    """``1 - |column|^2`` per incoming trace; the first half is the psi0 side."""
    s = scattering_map(cfg)
    return 1.0 - np.sum(np.abs(s) ** 2, axis=0)


@dataclass(frozen=True)
class ModeField:
    """Modes ``psi_n(x)``, ``n = 0 .. n_max``, on a uniform periodic x-grid."""

    x_grid: np.ndarray
    amplitudes: np.ndarray  # shape (len(x_grid), n_max + 1)

    def __post_init__(self):
        if len(self.x_grid) < 2:
            raise ValueError("need at least two x samples")
        if self.amplitudes.shape[0] != len(self.x_grid):
            raise ValueError("one row of amplitudes per x sample")
        if not np.all(np.isfinite(self.amplitudes)):
            raise ValueError("amplitudes must be finite")

    @classmethod
    def from_torus(cls, values, L, n_max: int) -> "ModeField":
        """Modes of samples ``values[i, j] = psi(x_i, y_j)`` on uniform grids."""
        values = np.asarray(values, dtype=complex)
        nx, ny = values.shape
        if n_max >= ny // 2:
            raise ValueError("n_max must stay below half the y sample count")
        modes = np.fft.fft(values, axis=1) / ny
        return cls(np.arange(nx) * (L / nx), modes[:, : n_max + 1])

    def wall_traces(self, A) -> dict:
        """Grid columns just before and after each wall."""
        x = self.x_grid
        after_a = int(np.searchsorted(x, A, side="left"))
        return {
            "0-": self.amplitudes[-1],
            "0+": self.amplitudes[0],
            "A-": self.amplitudes[after_a - 1],
            "A+": self.amplitudes[after_a % len(x)],
        }
