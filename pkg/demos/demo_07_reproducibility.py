"""
Seeds, blocks and workers
=========================

Each realization draws from its own stream keyed by seed, range, node
count and index.  Blocks of realizations can therefore be computed
anywhere and merged, and the worker count never changes a result.
"""

from adhocnet.ensemble import ExperimentPlan, connectivity_fragment, merge

plan = ExperimentPlan(L=30, z_list=(2,), realizations=120, seed=2008)

whole = connectivity_fragment(plan, 2, 0.2, workers=1).point()
blocks = [connectivity_fragment(plan, 2, 0.2, range(i, i + 30), workers=1)
          for i in range(0, 120, 30)]
print("one run:     ", whole)
print("four blocks: ", merge(blocks).point())
print("reversed:    ", merge(blocks[::-1]).point())
print("two workers: ", connectivity_fragment(plan, 2, 0.2, workers=2).point())
