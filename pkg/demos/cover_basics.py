"""Walkthrough: cover order, refinement, join, and the nerve duality.

Run with: python3 demos/cover_basics.py
"""

from meandim.covers import Cover, GroundSet, d_upper, join, order, order_at, refines, singletons
from meandim.simplicial import combinatorial_dimension, nerve

ground = GroundSet(("1", "2", "3", "4", "5"))
alpha = Cover.of(ground, {
    "left": ["1", "2", "3"],
    "right": ["3", "4", "5"],
    "middle": ["2", "3", "4"],
})

print("A cover of a five-point space by three overlapping sets.")
for p in ground.points:
    print(f"  point {p}: sits in {order_at(alpha, p) + 1} sets")
print(f"order(alpha) = {order(alpha)}  (max multiplicity minus one)")

fine = singletons(ground)
print(f"\nThe singleton partition refines alpha: {refines(fine, alpha)}")
print(f"alpha refines the singleton partition: {refines(alpha, fine)}")

j = join(alpha, alpha)
print(f"\njoin(alpha, alpha) has {len(j.sets)} distinct members, order {order(j)}")

nv = nerve(alpha)
print("\nNerve of alpha: simplexes record which members meet.")
print(f"  facets: {[sorted(f) for f in nv.facets]}")
print(f"  combinatorial dimension = {combinatorial_dimension(nv)} = order(alpha): "
      f"{combinatorial_dimension(nv) == order(alpha)}")

bound = d_upper(alpha, [fine], budget=5)
print(f"\nEnumerated refinement bound on the minimal order: {bound} "
      "(discrete spaces always admit an order-0 refinement)")
