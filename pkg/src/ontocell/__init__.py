"""Deterministic periodic cells and the quantum operators that describe them.

Submodules: ``numerics`` (dense linear algebra), ``cell`` (single periodic
cell), ``su2`` (x/p basis bridge), ``automaton`` (lattices with exchange
terms), ``sieve`` (torus model with partial walls), ``kinetic`` (beable for
``H = T(p)``) and ``cli``.
"""
__version__ = "0.1.0"
