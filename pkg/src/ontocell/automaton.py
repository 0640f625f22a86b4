"""Lattices of periodic cells coupled by ontological exchange terms.

Product states are indexed in mixed radix with cell 0 varying fastest:
``index = k_0 + N_0 * (k_1 + N_1 * (k_2 + ...))``.  Correspondingly a
full-space operator is ``kron(op_last, ..., op_1, op_0)``.

A strength-pi exchange term on cell ``i`` between ``k1`` and ``k2`` is
``pi |psi><psi|`` with ``psi = (|k1> - |k2>)/sqrt(2)``, optionally multiplied
by a projector onto a set of values of another ("sieve") cell.  Its
exponential ``exp(-i term)`` swaps ``k1`` and ``k2`` (conditionally, if
sieved) without any phase.

The classical rule and the quantum one-step operator use the same order: all
swaps in declared list order, then every cell advances by one.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .cell import CellSpec, energy_levels, fourier_matrix, hamiltonian, shift_operator
from .numerics import DEFAULT_TOL, commutator_norm, is_permutation, mat_exp

MAX_DIM = 4096


@dataclass(frozen=True)
class LatticeSpec:
    cells: tuple[CellSpec, ...]
    neighbor_pairs: frozenset = frozenset()

    def __post_init__(self):
        cells = tuple(self.cells)
        if not cells:
            raise ValueError("a lattice needs at least one cell")
        dts = {c.delta_t for c in cells}
        if len(dts) != 1:
            raise ValueError(f"cells must share delta_t, got {sorted(dts)}")
        pairs = frozenset(tuple(sorted(p)) for p in self.neighbor_pairs)
        for a, b in pairs:
            if not (0 <= a < len(cells) and 0 <= b < len(cells)) or a == b:
                raise ValueError(f"bad neighbour pair {(a, b)}")
        object.__setattr__(self, "cells", cells)
        object.__setattr__(self, "neighbor_pairs", pairs)
        if self.dim > MAX_DIM:
            raise ValueError(f"product dimension {self.dim} exceeds {MAX_DIM}")

    @classmethod
    def from_sizes(cls, sizes, delta_t: float = 1.0, neighbor_pairs=()) -> "LatticeSpec":
        return cls(tuple(CellSpec(n, delta_t) for n in sizes), frozenset(neighbor_pairs))

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(c.N for c in self.cells)

    @property
    def delta_t(self) -> float:
        return self.cells[0].delta_t

    @property
    def dim(self) -> int:
        return math.prod(self.sizes)

    def encode(self, ks) -> int:
        index, stride = 0, 1
        for k, n in zip(ks, self.sizes):
            index += k * stride
            stride *= n
        return index

    def decode(self, index: int) -> tuple[int, ...]:
        out = []
        for n in self.sizes:
            index, k = divmod(index, n)
            out.append(k)
        return tuple(out)

    def configurations(self):
        """All configurations in index order."""
        for index in range(self.dim):
            yield self.decode(index)


@dataclass(frozen=True)
class SieveCondition:
    cell: int
    values: frozenset

    def __post_init__(self):
        values = frozenset(int(v) for v in self.values)
        if not values:
            raise ValueError("a sieve condition needs at least one value")
        object.__setattr__(self, "values", values)


@dataclass(frozen=True)
class ExchangeTerm:
    """``sign * strength * P_sieve (x) |psi><psi|`` on ``target_cell``."""

    target_cell: int
    k1: int
    k2: int
    condition: SieveCondition | None = None
    strength: float = math.pi
    sign: int = 1

    def __post_init__(self):
        if not self.k2 > self.k1 >= 0:
            raise ValueError(f"need 0 <= k1 < k2, got k1={self.k1}, k2={self.k2}")
        if not 0 < self.strength <= math.pi:
            raise ValueError(f"strength must lie in (0, pi], got {self.strength}")
        if self.sign not in (-1, 1):
            raise ValueError(f"sign must be +1 or -1, got {self.sign}")
        if self.condition is not None and self.condition.cell == self.target_cell:
            raise ValueError("a sieve condition cannot reference the target cell itself")

    @property
    def is_ontological(self) -> bool:
        return self.strength == math.pi

    @property
    def support(self) -> frozenset:
        cells = {self.target_cell}
        if self.condition is not None:
            cells.add(self.condition.cell)
        return frozenset(cells)

    def validate(self, lattice: LatticeSpec) -> None:
        sizes = lattice.sizes
        if not 0 <= self.target_cell < len(sizes):
            raise ValueError(f"target cell {self.target_cell} not in lattice")
        if self.k2 >= sizes[self.target_cell]:
            raise ValueError(f"k2={self.k2} not a state of cell {self.target_cell}")
        if self.condition is not None:
            c = self.condition
            if not 0 <= c.cell < len(sizes):
                raise ValueError(f"sieve cell {c.cell} not in lattice")
            bad = [v for v in c.values if not 0 <= v < sizes[c.cell]]
            if bad:
                raise ValueError(f"sieve values {bad} not states of cell {c.cell}")


@dataclass(frozen=True)
class ClassicalConfig:
    k_values: tuple[int, ...]

    def validate(self, lattice: LatticeSpec) -> None:
        if len(self.k_values) != len(lattice.sizes):
            raise ValueError("one value per cell required")
        for k, n in zip(self.k_values, lattice.sizes):
            if not 0 <= k < n:
                raise ValueError(f"value {k} outside [0, {n - 1}]")


def embed(lattice: LatticeSpec, local: dict) -> np.ndarray:
    """Tensor the given single-cell operators with identities elsewhere."""
    out = np.ones((1, 1), dtype=complex)
    for i, n in enumerate(lattice.sizes):
        op = local.get(i)
        if op is None:
            op = np.eye(n, dtype=complex)
        out = np.kron(op, out)
    return out


def build_H0(lattice: LatticeSpec) -> np.ndarray:
    """Sum over cells of the single-cell Hamiltonian, ontological product basis."""
    h = np.zeros((lattice.dim, lattice.dim), dtype=complex)
    for i, cell in enumerate(lattice.cells):
        h += embed(lattice, {i: hamiltonian(cell)})
    return h


def H0_spectrum(lattice: LatticeSpec) -> np.ndarray:
    """Eigenvalues of ``H0`` as sums of single-cell levels, sorted."""
    levels = [energy_levels(c) for c in lattice.cells]
    return np.sort([sum(combo) for combo in itertools.product(*levels)])


def projector(n: int, states) -> np.ndarray:
    p = np.zeros((n, n), dtype=complex)
    idx = sorted(states)
    p[idx, idx] = 1.0
    return p


def psi_projector(n: int, k1: int, k2: int, plus: bool = False) -> np.ndarray:
    v = np.zeros(n, dtype=complex)
    v[k1] = 1 / math.sqrt(2)
    v[k2] = (1 if plus else -1) / math.sqrt(2)
    return np.outer(v, v.conj())


def exchange_hamiltonian(lattice: LatticeSpec, term: ExchangeTerm) -> np.ndarray:
    term.validate(lattice)
    sizes = lattice.sizes
    local = {term.target_cell: psi_projector(sizes[term.target_cell], term.k1, term.k2)}
    if term.condition is not None:
        local[term.condition.cell] = projector(sizes[term.condition.cell], term.condition.values)
    return term.sign * term.strength * embed(lattice, local)


def _require_ontological(terms):
    for t in terms:
        if not t.is_ontological:
            raise ValueError(f"classical equivalence needs strength pi, got {t.strength}")


def classical_step(lattice: LatticeSpec, terms, cfg: ClassicalConfig) -> ClassicalConfig:
    """Swaps in list order, then every cell advances ``k -> k+1 mod N``."""
    _require_ontological(terms)
    cfg.validate(lattice)
    ks = list(cfg.k_values)
    for t in terms:
        t.validate(lattice)
        cond = t.condition
        if cond is not None and ks[cond.cell] not in cond.values:
            continue
        k = ks[t.target_cell]
        if k == t.k1:
            ks[t.target_cell] = t.k2
        elif k == t.k2:
            ks[t.target_cell] = t.k1
    return ClassicalConfig(tuple((k + 1) % n for k, n in zip(ks, lattice.sizes)))


def classical_step_inverse(lattice: LatticeSpec, terms, cfg: ClassicalConfig) -> ClassicalConfig:
    """Undo :func:`classical_step`: step back, then the swaps in reverse order."""
    _require_ontological(terms)
    cfg.validate(lattice)
    ks = [(k - 1) % n for k, n in zip(cfg.k_values, lattice.sizes)]
    for t in reversed(list(terms)):
        cond = t.condition
        if cond is not None and ks[cond.cell] not in cond.values:
            continue
        k = ks[t.target_cell]
        if k == t.k1:
            ks[t.target_cell] = t.k2
        elif k == t.k2:
            ks[t.target_cell] = t.k1
    return ClassicalConfig(tuple(ks))


def classical_map(lattice: LatticeSpec, terms) -> np.ndarray:
    """``classical_step`` tabulated as index -> index."""
    return np.array([
        lattice.encode(classical_step(lattice, terms, ClassicalConfig(ks)).k_values)
        for ks in lattice.configurations()
    ])


def free_evolution(lattice: LatticeSpec) -> np.ndarray:
    return mat_exp(build_H0(lattice), -1j * lattice.delta_t)


def one_step_unitary(lattice: LatticeSpec, terms, mode: str = "equivalence") -> np.ndarray:
    """One time step of ``H0`` plus the exchange terms.

    ``equivalence``: ``exp(-i H0 dt) @ exp(-i T_last) @ ... @ exp(-i T_first)``,
    the ordered product that :func:`classical_step` mirrors; all strengths
    must be pi.  ``effective``: the single exponential
    ``exp(-i dt (H0 + sum T))`` for arbitrary strengths.
    """
    terms = list(terms)
    for t in terms:
        t.validate(lattice)
    if mode == "equivalence":
        _require_ontological(terms)
        u = np.eye(lattice.dim, dtype=complex)
        for t in terms:
            u = mat_exp(exchange_hamiltonian(lattice, t), -1j) @ u
        return free_evolution(lattice) @ u
    if mode == "effective":
        h = build_H0(lattice)
        for t in terms:
            h = h + exchange_hamiltonian(lattice, t)
        return mat_exp(h, -1j * lattice.delta_t)
    raise ValueError(f"unknown mode {mode!r}")


@dataclass(frozen=True)
class EquivalenceReport:
    permutation: bool
    residual: float
    matches_classical: bool
    quantum_map: np.ndarray | None = field(repr=False)
    classical_map: np.ndarray = field(repr=False)

    @property
    def ok(self) -> bool:
        return self.permutation and self.matches_classical


def verify_equivalence(lattice: LatticeSpec, terms, tol: float = DEFAULT_TOL) -> EquivalenceReport:
    u = one_step_unitary(lattice, terms, "equivalence")
    check = is_permutation(u, tol)
    cmap = classical_map(lattice, terms)
    matches = check.ok and bool(np.array_equal(check.mapping, cmap))
    return EquivalenceReport(check.ok, check.residual, matches, check.mapping, cmap)


@dataclass(frozen=True)
class LocalityEntry:
    pair: tuple[int, int]
    norm: float
    disjoint: bool
    adjacent: bool


def locality_report(lattice: LatticeSpec, terms) -> list[LocalityEntry]:
    terms = list(terms)
    mats = [exchange_hamiltonian(lattice, t) for t in terms]
    out = []
    for i, j in itertools.combinations(range(len(terms)), 2):
        a, b = terms[i].support, terms[j].support
        disjoint = not (a & b)
        adjacent = any(tuple(sorted((x, y))) in lattice.neighbor_pairs for x in a for y in b if x != y)
        out.append(LocalityEntry((i, j), commutator_norm(mats[i], mats[j]), disjoint, adjacent))
    return out


def low_energy_matrix_element(lattice: LatticeSpec, term: ExchangeTerm, e_max: float) -> float:
    """Largest ``|<k1, chi| H_int |k2, chi>|`` over low-energy sieve states.

    ``chi`` ranges over normalised states of the sieve cell built from energy
    levels ``<= e_max``; the target-cell states stay ``|k1>``, ``|k2>``.  The
    maximum is ``strength/2`` times the top eigenvalue of ``P_E P_r P_E``.
    Without a sieve condition nothing is suppressed.
    """
    term.validate(lattice)
    if e_max < 0:
        raise ValueError("no energy levels at or below e_max")
    half = term.strength / 2
    if term.condition is None:
        return half
    cell = lattice.cells[term.condition.cell]
    keep = energy_levels(cell) <= e_max * (1 + 1e-12)
    f = fourier_matrix(cell)[:, keep]
    low = f @ f.conj().T
    p_r = projector(cell.N, term.condition.values)
    overlap = np.linalg.eigvalsh(low @ p_r @ low)[-1]
    return half * float(max(overlap, 0.0))


def random_lattice(rng: np.random.Generator, max_cells: int = 4, max_n: int = 6, max_terms: int = 5):
    """A random lattice with strength-pi terms, for the equivalence suite."""
    n_cells = int(rng.integers(1, max_cells + 1))
    sizes = [int(rng.integers(2, max_n + 1)) for _ in range(n_cells)]
    lattice = LatticeSpec.from_sizes(sizes)
    terms = []
    for _ in range(int(rng.integers(0, max_terms + 1))):
        target = int(rng.integers(n_cells))
        k1, k2 = sorted(int(v) for v in rng.choice(sizes[target], size=2, replace=False))
        cond = None
        if n_cells > 1 and rng.random() < 0.6:
            cell = int(rng.choice([c for c in range(n_cells) if c != target]))
            count = int(rng.integers(1, sizes[cell] + 1))
            values = frozenset(int(v) for v in rng.choice(sizes[cell], size=count, replace=False))
            cond = SieveCondition(cell, values)
        sign = int(rng.choice([-1, 1]))
        terms.append(ExchangeTerm(target, k1, k2, cond, math.pi, sign))
    return lattice, terms
