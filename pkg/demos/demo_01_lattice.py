"""
Hexagonal lattice with periodic boundaries
==========================================

Sites carry axial coordinates (q, r) on an L x L torus.  A node reaches
every site within hex distance z, which gives 3 z (z + 1) sites.
"""

from adhocnet.lattice import DIRECTIONS, LatticeConfig, hex_distance, neighborhood_offsets, wrap

cfg = LatticeConfig(L=10, z=2)
print("sites:", cfg.N)

# the six nearest-neighbour moves
print("moves:", [tuple(int(v) for v in d) for d in DIRECTIONS])

# distances take the shortest way around the torus
print("d((0,0), (1,0)) =", hex_distance((0, 0), (1, 0), cfg))
print("d((0,0), (9,0)) =", hex_distance((0, 0), (9, 0), cfg))
print("d((0,0), (5,5)) =", hex_distance((0, 0), (5, 5), cfg))
print("wrap((-1, 23)) =", wrap((-1, 23), cfg))

# neighbourhood sizes grow quadratically with the range
for z in range(1, 7):
    table = neighborhood_offsets(z)
    print(f"z={z}: {table.size} sites in range, {len(table.half)} in the half stencil")
