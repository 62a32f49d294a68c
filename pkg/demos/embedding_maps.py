"""Walkthrough: the constructive embedding toolkit.

Covers the explicit equator-swap sphere map, window separation along orbits,
general position by perturbation, a patterned-matrix genericity run, and the
window-index finder at the heart of the marker-based embedding argument.

Run with: python3 demos/embedding_maps.py
"""

from fractions import Fraction

from meandim.embed import (
    PatternMatrix,
    WindowSequence,
    equator_reflection,
    find_window_index,
    is_general_position,
    pattern_generic_invertibility,
    perturb_general_position,
    sphere_demo,
    sphere_point,
    sphere_sequence,
    symbolic_pattern_det,
    window_index_oracle,
)

F = Fraction

print("Sphere demo: the alternating two-coordinate sequence")
p = sphere_point(F(1, 3), F(2, 5))
print(f"  point {tuple(str(c) for c in p)}")
print(f"  first two sequence entries: {sphere_sequence(p, 0)}, {sphere_sequence(p, 1)}")
sp = equator_reflection(p)
print(f"  reflection shifts the sequence: "
      f"{all(sphere_sequence(sp, k) == sphere_sequence(p, k + 1) for k in range(-3, 3))}")
rep = sphere_demo(100, seed=3)
print(f"  sampled run: {rep.pairs_checked} pairs, "
      f"equivariance failures {rep.equivariance_failures}, "
      f"injectivity failures {rep.injectivity_failures}")

print("\nGeneral position by perturbation")
pts = [(F(0), F(0)), (F(1), F(1)), (F(2), F(2)), (F(3), F(3))]
print(f"  four collinear points: general position = {is_general_position(pts)}")
moved = perturb_general_position(pts, F(1, 100), seed=4)
print(f"  after perturbing within 1/100: general position = {is_general_position(moved)}")

print("\nPatterned matrix genericity")
pat = PatternMatrix.of([[1, 2, 3], [3, 1, 2], [2, 3, 1]])
run = pattern_generic_invertibility(pat, trials=500, seed=5)
print(f"  500 sampled instantiations, exact zero determinants: {len(run.failures)}")
poly = symbolic_pattern_det(pat)
print(f"  symbolic determinant has {len(poly)} monomials (nonzero polynomial)")

print("\nWindow-index finder")
m = 8
values = list(range(-3 * m // 2, m // 2))
seq = WindowSequence.of(m, values)
r = find_window_index(seq)
print(f"  break-free ramp, M = {m}: anchor r = {r}")
print(f"  exhaustive oracle agrees: r in {window_index_oracle(seq)}")
