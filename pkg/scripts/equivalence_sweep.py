"""Random lattices: quantum one-step evolution vs the integer update rule.

    python3 scripts/equivalence_sweep.py [COUNT] [SEED]
"""
import sys
import time

import numpy as np

from ontocell import automaton as am
from ontocell.cli import DEFAULT_SEED

count = int(sys.argv[1]) if len(sys.argv) > 1 else 300
seed = int(sys.argv[2]) if len(sys.argv) > 2 else DEFAULT_SEED
rng = np.random.default_rng(seed)
t0 = time.perf_counter()
passed, worst, dims = 0, 0.0, []
for _ in range(count):
    lattice, terms = am.random_lattice(rng)
    rep = am.verify_equivalence(lattice, terms, 1e-10)
    passed += rep.ok
    worst = max(worst, rep.residual)
    dims.append(lattice.dim)
print(f"{passed}/{count} equivalent, worst residual {worst:.2e}, "
      f"median dim {int(np.median(dims))}, max dim {max(dims)}, {time.perf_counter() - t0:.1f}s")

# effective (single exponential) mode drifts from the permutation as terms stop commuting
lattice = am.LatticeSpec.from_sizes([4, 3])
terms = [am.ExchangeTerm(0, 0, 1), am.ExchangeTerm(0, 1, 2, am.SieveCondition(1, frozenset({0})))]
u = am.one_step_unitary(lattice, terms, "effective")
print("effective mode is a permutation:", bool(am.is_permutation(u, 1e-10)))
