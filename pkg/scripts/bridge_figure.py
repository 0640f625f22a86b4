"""Render the l = 53/2 bridge matrix between the two angular bases.

    python3 scripts/bridge_figure.py [OUT_DIR]
"""
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from ontocell import su2

out = Path(sys.argv[1] if len(sys.argv) > 1 else "figures")
out.mkdir(parents=True, exist_ok=True)
ell = Fraction(53, 2)
rec = su2.bridge_by_recursion(ell)
rot = su2.bridge_by_rotation(ell)
su2.render_bridge(rec, out / "bridge_53_2.pgm")
su2.write_bridge_csv(rec, out / "bridge_53_2.csv")
print(f"dim {rec.dim}, recursion vs rotation max diff {np.max(np.abs(rec.entries - rot.entries)):.2e}")
for f in (1.0, 1.05, 1.1, 1.15, 1.2, 1.3):
    print(f"support beyond {f:.2f} * sqrt(l(l+1)): {su2.support_profile(rec, f):.3e}")
print(f"wrote {out / 'bridge_53_2.pgm'}")
