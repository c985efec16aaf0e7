"""
Nodes moving on the lattice
===========================

n0 = round(sigma N) nodes are dropped on distinct sites and then walk with
exclusion: in each step every node, in random order, tries one of the six
moves and stays put if the target is taken.
"""

import numpy as np

from adhocnet.dynamics import RngStream, occupancy, random_placement, step, warm_up
from adhocnet.lattice import LatticeConfig

cfg = LatticeConfig(L=30, z=2)
place = RngStream(seed=1, purpose="place")
config = random_placement(cfg, 0.3, place)
print("nodes:", config.n0, "occupancy:", occupancy(config))

# one step moves most nodes by exactly one site
before = config.positions.copy()
step(config, place.sibling("move").generator)
moved = np.any(config.positions != before, axis=1)
print(f"moved in one step: {moved.mean():.1%}")

# the default warm-up is L steps; node count and exclusion survive it
warm_up(config, cfg.L, place.sibling("move"))
config.check()
print("after warm-up:", config.n0, "nodes on", len(set(map(tuple, config.positions.tolist()))),
      "distinct sites")

# a full lattice is frozen
full = random_placement(LatticeConfig(8, 1), 1.0, 0)
start = full.positions.copy()
warm_up(full, 5, np.random.default_rng(0))
print("full lattice unchanged:", bool(np.array_equal(start, full.positions)))
