import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ontocell import automaton as am
from ontocell.cell import CellSpec, energy_levels, fourier_matrix, hamiltonian
from ontocell.numerics import is_permutation, mat_exp

PI = math.pi


def example_lattice():
    lattice = am.LatticeSpec.from_sizes([4, 3])
    term = am.ExchangeTerm(0, 0, 2, am.SieveCondition(1, frozenset({1})))
    return lattice, [term]


def test_index_encoding_cell_zero_fastest():
    lat = am.LatticeSpec.from_sizes([2, 3])
    assert lat.encode((1, 0)) == 1
    assert lat.encode((0, 1)) == 2
    assert [lat.decode(i) for i in range(lat.dim)] == list(lat.configurations())
    assert all(lat.encode(lat.decode(i)) == i for i in range(lat.dim))


def test_lattice_invariants():
    with pytest.raises(ValueError):
        am.LatticeSpec((CellSpec(2, 1.0), CellSpec(2, 0.5)))
    with pytest.raises(ValueError):
        am.LatticeSpec.from_sizes([17, 16, 16])
    with pytest.raises(ValueError):
        am.LatticeSpec.from_sizes([2, 2], neighbor_pairs=[(0, 0)])
    with pytest.raises(ValueError):
        am.LatticeSpec(())


def test_H0_single_cell_is_cell_hamiltonian():
    lat = am.LatticeSpec.from_sizes([5])
    assert np.allclose(am.build_H0(lat), hamiltonian(CellSpec(5)))


def test_H0_two_cells_shifts_both():
    lat = am.LatticeSpec.from_sizes([2, 3])
    check = is_permutation(am.free_evolution(lat))
    assert check
    for idx, (a, b) in enumerate(lat.configurations()):
        assert lat.decode(check.mapping[idx]) == ((a + 1) % 2, (b + 1) % 3)


@given(st.lists(st.integers(1, 5), min_size=1, max_size=3))
def test_H0_spectrum_is_kronecker_sum(sizes):
    lat = am.LatticeSpec.from_sizes(sizes)
    w = np.linalg.eigvalsh(am.build_H0(lat))
    oracle = np.zeros(1)
    for n in sizes:
        oracle = np.add.outer(energy_levels(CellSpec(n)), oracle).ravel()
    assert np.allclose(np.sort(w), np.sort(oracle), atol=1e-10)
    assert np.allclose(am.H0_spectrum(lat), np.sort(oracle))


def test_exchange_two_states_is_swap():
    lat = am.LatticeSpec.from_sizes([2])
    h = am.exchange_hamiltonian(lat, am.ExchangeTerm(0, 0, 1))
    assert np.allclose(mat_exp(h, -1j), [[0, 1], [1, 0]], atol=1e-12)
    phi = np.array([1, 1]) / math.sqrt(2)
    assert np.allclose(h @ phi, 0)


@pytest.mark.parametrize("sign", [1, -1])
def test_both_signs_give_the_swap(sign):
    lat = am.LatticeSpec.from_sizes([5, 2])
    term = am.ExchangeTerm(0, 1, 3, am.SieveCondition(1, frozenset({0})), sign=sign)
    u = mat_exp(am.exchange_hamiltonian(lat, term), -1j)
    check = is_permutation(u, 1e-12)
    assert check
    assert np.allclose(check.phases, 1, atol=1e-12)


def test_conditioned_term_vanishes_where_sieve_value_absent():
    lat = am.LatticeSpec.from_sizes([3, 4])
    h = am.exchange_hamiltonian(lat, am.ExchangeTerm(0, 0, 1, am.SieveCondition(1, frozenset({2}))))
    keep = [lat.encode(ks) for ks in lat.configurations() if ks[1] != 2]
    assert np.array_equal(h[np.ix_(keep, keep)], np.zeros((len(keep), len(keep))))


def test_exchange_matches_direct_kron():
    lat = am.LatticeSpec.from_sizes([3, 4])
    term = am.ExchangeTerm(0, 0, 2, am.SieveCondition(1, frozenset({1, 3})), strength=0.7)
    psi = np.array([1, 0, -1]) / math.sqrt(2)
    pr = np.diag([0, 1, 0, 1])
    assert np.allclose(am.exchange_hamiltonian(lat, term), 0.7 * np.kron(pr, np.outer(psi, psi)))


def test_term_validation():
    with pytest.raises(ValueError):
        am.ExchangeTerm(0, 2, 1)
    with pytest.raises(ValueError):
        am.ExchangeTerm(0, 0, 1, strength=4.0)
    with pytest.raises(ValueError):
        am.ExchangeTerm(0, 0, 1, sign=0)
    with pytest.raises(ValueError):
        am.ExchangeTerm(0, 0, 1, am.SieveCondition(0, frozenset({1})))
    with pytest.raises(ValueError):
        am.SieveCondition(1, frozenset())
    lat = am.LatticeSpec.from_sizes([2, 2])
    with pytest.raises(ValueError):
        am.exchange_hamiltonian(lat, am.ExchangeTerm(0, 0, 2))
    with pytest.raises(ValueError):
        am.exchange_hamiltonian(lat, am.ExchangeTerm(0, 0, 1, am.SieveCondition(1, frozenset({5}))))


@given(st.lists(st.integers(2, 4), min_size=1, max_size=3), st.integers(0, 2**32 - 1))
def test_exchange_hamiltonians_hermitian_exactly(sizes, seed):
    rng = np.random.default_rng(seed)
    lat = am.LatticeSpec.from_sizes(sizes)
    _, terms = am.random_lattice(rng, max_cells=1)
    for t in terms:
        t2 = am.ExchangeTerm(0, t.k1, t.k2, strength=float(rng.uniform(0.1, PI)))
        if t2.k2 < sizes[0]:
            h = am.exchange_hamiltonian(lat, t2)
            assert np.array_equal(h, h.conj().T)


def test_classical_step_examples():
    lat = am.LatticeSpec.from_sizes([4])
    out = am.classical_step(lat, [am.ExchangeTerm(0, 1, 3)], am.ClassicalConfig((1,)))
    assert out.k_values == (0,)
    assert am.classical_step(lat, [], am.ClassicalConfig((3,))).k_values == (0,)
    lat, terms = example_lattice()
    assert am.classical_step(lat, terms, am.ClassicalConfig((0, 1))).k_values == (3, 2)
    assert am.classical_step(lat, terms, am.ClassicalConfig((0, 0))).k_values == (1, 1)
    images = {am.classical_step(lat, terms, am.ClassicalConfig(ks)).k_values for ks in lat.configurations()}
    assert len(images) == 12


def test_classical_step_rejects_weak_terms():
    lat = am.LatticeSpec.from_sizes([3])
    with pytest.raises(ValueError):
        am.classical_step(lat, [am.ExchangeTerm(0, 0, 1, strength=1.0)], am.ClassicalConfig((0,)))
    with pytest.raises(ValueError):
        am.classical_step(lat, [], am.ClassicalConfig((3,)))


def test_example_lattice_equivalence():
    lat, terms = example_lattice()
    rep = am.verify_equivalence(lat, terms)
    assert rep.ok
    assert np.array_equal(rep.quantum_map, rep.classical_map)


def test_no_terms_is_shift():
    lat = am.LatticeSpec.from_sizes([3, 2])
    u = am.one_step_unitary(lat, [])
    assert np.allclose(u, am.free_evolution(lat))
    assert am.verify_equivalence(lat, []).ok


def test_half_strength_is_not_a_permutation():
    lat = am.LatticeSpec.from_sizes([2])
    u = am.one_step_unitary(lat, [am.ExchangeTerm(0, 0, 1, strength=PI / 2)], mode="effective")
    assert not is_permutation(u)
    with pytest.raises(ValueError):
        am.one_step_unitary(lat, [am.ExchangeTerm(0, 0, 1, strength=PI / 2)])
    with pytest.raises(ValueError):
        am.one_step_unitary(lat, [], mode="other")


def test_effective_mode_converges_to_permutation():
    lat = am.LatticeSpec.from_sizes([2])
    target = am.one_step_unitary(lat, [am.ExchangeTerm(0, 0, 1)])
    gaps = [np.max(np.abs(am.one_step_unitary(lat, [am.ExchangeTerm(0, 0, 1, strength=s)], "effective") - target))
            for s in (PI / 2, 0.9 * PI, 0.99 * PI, 0.999 * PI, PI)]
    assert all(a > b for a, b in zip(gaps, gaps[1:]))
    assert gaps[-1] < 1e-12


@settings(max_examples=20)
@given(st.integers(0, 2**63 - 1))
def test_random_lattices_equivalent(seed):
    lat, terms = am.random_lattice(np.random.default_rng(seed))
    assert am.verify_equivalence(lat, terms).ok


@settings(max_examples=20)
@given(st.integers(0, 2**63 - 1))
def test_classical_step_inverse(seed):
    lat, terms = am.random_lattice(np.random.default_rng(seed))
    for ks in lat.configurations():
        cfg = am.ClassicalConfig(ks)
        fwd = am.classical_step(lat, terms, cfg)
        assert am.classical_step_inverse(lat, terms, fwd) == cfg


@settings(max_examples=20)
@given(st.integers(0, 2**63 - 1))
def test_sign_flags_do_not_change_classical_map(seed):
    rng = np.random.default_rng(seed)
    lat, terms = am.random_lattice(rng)
    flipped = [am.ExchangeTerm(t.target_cell, t.k1, t.k2, t.condition, t.strength, -t.sign) for t in terms]
    a = am.verify_equivalence(lat, terms)
    b = am.verify_equivalence(lat, flipped)
    assert a.ok and b.ok
    assert np.array_equal(a.quantum_map, b.quantum_map)


def test_locality_examples():
    lat = am.LatticeSpec.from_sizes([3, 3, 3, 3], neighbor_pairs=[(1, 2)])
    t01 = am.ExchangeTerm(0, 0, 1, am.SieveCondition(1, frozenset({2})))
    t23 = am.ExchangeTerm(2, 1, 2, am.SieveCondition(3, frozenset({0})))
    rep = am.locality_report(lat, [t01, t23, t01])
    by_pair = {e.pair: e for e in rep}
    assert by_pair[(0, 1)].disjoint and by_pair[(0, 1)].norm == 0.0
    assert by_pair[(0, 1)].adjacent
    assert by_pair[(0, 2)].norm == 0.0 and not by_pair[(0, 2)].disjoint


def test_overlapping_terms_do_not_commute():
    lat = am.LatticeSpec.from_sizes([3])
    a, b = am.ExchangeTerm(0, 0, 2), am.ExchangeTerm(0, 1, 2)
    (entry,) = am.locality_report(lat, [a, b])
    pa = PI * np.outer([1, 0, -1], [1, 0, -1]) / 2
    pb = PI * np.outer([0, 1, -1], [0, 1, -1]) / 2
    assert math.isclose(entry.norm, np.linalg.norm(pa @ pb - pb @ pa), rel_tol=1e-12)
    assert entry.norm > 0.1


def _low_energy_oracle(lat, term, e_max):
    """Max over low-energy sieve states of the full-space matrix element."""
    h = am.exchange_hamiltonian(lat, term)
    sieve = lat.cells[term.condition.cell]
    f = fourier_matrix(sieve)
    keep = [n for n, e in enumerate(energy_levels(sieve)) if e <= e_max * (1 + 1e-12)]
    n0 = lat.sizes[term.target_cell]
    b = np.zeros((len(keep), len(keep)), dtype=complex)
    for i, a in enumerate(keep):
        for j, c in enumerate(keep):
            left = np.kron(f[:, a], np.eye(n0)[term.k1])
            right = np.kron(f[:, c], np.eye(n0)[term.k2])
            b[i, j] = left.conj() @ h @ right
    return float(np.max(np.abs(np.linalg.eigvalsh(b))))


def test_low_energy_matrix_element_suppression():
    lat = am.LatticeSpec.from_sizes([2, 32])
    term = am.ExchangeTerm(0, 0, 1, am.SieveCondition(1, frozenset({5})))
    band = energy_levels(lat.cells[1])[-1]
    vals = [am.low_energy_matrix_element(lat, term, f * band) for f in (1.0, 0.75, 0.5, 0.25)]
    assert math.isclose(vals[0], PI / 2, rel_tol=1e-12)
    assert all(a > b for a, b in zip(vals, vals[1:]))
    for f, v in zip((1.0, 0.75, 0.5, 0.25), vals):
        assert math.isclose(v, _low_energy_oracle(lat, term, f * band), rel_tol=1e-9)
    with pytest.raises(ValueError):
        am.low_energy_matrix_element(lat, term, -1.0)


def test_low_energy_unconditioned_is_unsuppressed():
    lat = am.LatticeSpec.from_sizes([3])
    assert am.low_energy_matrix_element(lat, am.ExchangeTerm(0, 0, 1), 0.0) == PI / 2


def test_two_state_target_reconstruction():
    # a swap of the two states of a 2-cell is the strength-pi exchange
    lat = am.LatticeSpec.from_sizes([2])
    swap = np.array([[0, 1], [1, 0]])
    h = am.exchange_hamiltonian(lat, am.ExchangeTerm(0, 0, 1))
    assert np.allclose(mat_exp(h, -1j), swap)
    # three states: a 3-cycle composed from two swaps in order
    lat3 = am.LatticeSpec.from_sizes([3])
    terms = [am.ExchangeTerm(0, 0, 1), am.ExchangeTerm(0, 1, 2)]
    u = np.eye(3)
    for t in terms:
        u = mat_exp(am.exchange_hamiltonian(lat3, t), -1j) @ u
    mapping = is_permutation(u).mapping
    assert list(mapping) == [2, 0, 1]
