"""Drift of the kinetic beable in double vs extended precision.

    python3 scripts/drift_precision.py

The drift for T = p^2/2 falls steeply with M until it meets the roundoff
floor of the working precision.  Extended precision lowers that floor and
shows the double-precision values past M = 128 are roundoff, not error.
"""
import numpy as np

from ontocell import kinetic

print(f"longdouble eps {np.finfo(np.longdouble).eps:.1e}")
print("    M   drift(float64)   drift(longdouble)   drift(T=p)")
for m in (64, 128, 256, 512):
    spec = kinetic.quadratic_positive(m)
    d64 = kinetic.drift_check(spec)
    dld = kinetic.drift_check(kinetic.quadratic_positive(m, dtype=np.longdouble), np.longdouble)
    lin = kinetic.drift_check(kinetic.linear(m))
    print(f"{m:5d}   {d64:14.3e}   {dld:17.3e}   {lin:10.3e}")
