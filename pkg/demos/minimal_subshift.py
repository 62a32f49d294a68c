"""Walkthrough: staged block systems with a prescribed density target.

The greedy expansion picks stretch factors a_k with prod a_k/(a_k+1) = r;
each stage fixes the tail of its blocks to a catalogue word rich enough that
every admissible window recurs, which is what the shift probe certifies.

Run with: python3 demos/minimal_subshift.py
"""

from meandim import blocks

for r in ("1/2", "1/3", "2/3", "7/10"):
    sys = blocks.build(r, stages=5, m=2)
    print(f"target r = {r}: a-sequence {sys.a_seq} "
          f"({'exact' if sys.expansion_exhausted() else 'truncated'})")
    for st in sys.stages[1:]:
        ratio = blocks.free_dim_ratio(sys, st.n)
        print(f"  stage {st.n}: q = {st.q:>12,d}  L = {st.L:>11,d}  a = {st.a:>2d}  "
              f"free ratio = {ratio}")
    print(f"  lower bound  = {blocks.lower_bound_mdim(sys)}")
    n = sys.built
    print(f"  upper bounds = " + ", ".join(
        f"k={k}: {blocks.upper_bound_mdim(sys, n, k)}" for k in (10, 100, 1000)))
    ix = blocks.index_set(sys, n)
    print(f"  free-index density at q_{n}: "
          f"{blocks.index_density(ix, sys.stage(n).q)}")
    print()

print("Shift probe at stage 1 of the half-density system:")
sys = blocks.build("1/2", 1, 2)
rep = blocks.minimality_probe(sys, 0, trials=100, seed=1)
print(f"  {rep.successes}/{rep.trials} sampled pairs brought within "
      f"{rep.threshold} (worst certified distance {rep.worst_distance})")
