"""Walkthrough: markers and the stopped backward walk on finite systems.

A marker set is n-separated with forward images covering everything. The
walk stops with probability one on the marker and its expected stopping time
solves a per-cycle linear system exactly; the defect set of that function is
confined to one shifted copy of the stopping support, hence n-separated.

Run with: python3 demos/markers_rokhlin.py
"""

from meandim.dynsys import (
    FinitePermSystem,
    find_marker,
    is_marker,
    rokhlin_defect,
    rokhlin_expected_steps,
    rokhlin_property_check,
)

sys = FinitePermSystem.from_cycles([
    [f"a{i}" for i in range(7)],
    [f"b{i}" for i in range(11)],
])
n = 3
marker = find_marker(sys, n)
print(f"system: cycles of length 7 and 11, n = {n}")
print(f"marker: {sorted(marker)}   verifies: {is_marker(sys, marker, n)}")

rho = {p: 1 for p in marker}
f = rokhlin_expected_steps(sys, rho)
print("\nexpected stopping times along the first cycle:")
for i in range(7):
    p = f"a{i}"
    print(f"  f({p}) = {f[p]}")

defect = rokhlin_defect(sys, f)
print(f"\ndefect set: {sorted(defect)}")
print(f"preimage of the marker: {sorted(sys.preimage(marker))}")

rep = rokhlin_property_check(sys, n, marker, marker)
print(f"\nfull check: defect inside the shifted support = {rep.defect_in_shifted_support}, "
      f"n-separated = {rep.defect_n_separated}")
