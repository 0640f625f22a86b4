"""Sweep the wall height: oracle agreement, zero-mode block and leakage.

    python3 scripts/sieve_alpha_sweep.py [N_MAX]
"""
import sys

import numpy as np

from ontocell import sieve

n_max = int(sys.argv[1]) if len(sys.argv) > 1 else 8
print("alpha  max|map-oracle|  block00  block0A  deficit_n0  deficit_max")
for alpha in np.linspace(0, 1, 11):
    cfg = sieve.SieveModelConfig(2, 1, float(alpha), n_max)
    s = sieve.scattering_map(cfg)
    b = sieve.brute_force_scattering(cfg, 256)
    d = sieve.norm_deficit(cfg)
    size = n_max + 1
    print(f"{alpha:5.2f}  {np.max(np.abs(s - b)):14.2e}  {s[0, 0].real:7.3f}  {s[0, size].real:7.3f}"
          f"  {d[0]:10.4f}  {d.max():11.4f}")

print("\nleakage at alpha = 1/2 as the cutoff grows")
for n in (4, 8, 16, 32, 64, 128):
    print(f"n_max={n:4d}  deficit_n0={sieve.norm_deficit(sieve.SieveModelConfig(2, 1, 0.5, n))[0]:.6f}")
