"""
Connected components and eta
============================

Two nodes are linked when they are within range z.  The connectivity
sample eta is the fraction of nodes in the largest component.
"""

from adhocnet.connectivity import components_burning, components_unionfind, connectivity_sample
from adhocnet.ensemble import realization

# a few occupancies around the z=2 transition on a 60 x 60 lattice
for sigma in (0.1, 0.2, 0.3, 0.4):
    config = realization(L=60, z=2, sigma=sigma, seed=7, r=0)
    burn = components_burning(config)
    uf = components_unionfind(config)
    print(f"sigma={sigma}: n0={config.n0:5d}  components={len(burn.sizes):4d}  "
          f"largest={burn.largest:5d}  eta={connectivity_sample(config):.3f}  "
          f"same partition: {burn.same_partition(uf)}")

# burning probes every site of every node's neighbourhood once
config = realization(L=60, z=3, sigma=0.2, seed=7, r=0)
rep = components_burning(config)
print("probes per node at z=3:", rep.probes / rep.n0)
