"""Periodic triangular lattice in axial coordinates.

Sites are addressed by ``(q, r)`` with both components in ``[0, L)``.  The six
unit moves are ``(+-1, 0)``, ``(0, +-1)``, ``(+1, -1)`` and ``(-1, +1)``, so the
graph distance between two sites separated by ``(dq, dr)`` is::

    (|dq| + |dr| + |dq + dr|) / 2

On the torus the distance is minimised over the nine periodic images.  Two
nodes communicate when their hex distance is at most ``z``; the set of sites
within range of the origin is the hexagonal ball of ``3 z (z + 1)`` sites.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import InvalidParameterError

__all__ = [
    "DIRECTIONS",
    "LatticeConfig",
    "SiteCoord",
    "NeighborhoodTable",
    "axial_norm",
    "hex_distance",
    "neighborhood_offsets",
    "wrap",
]

# Ordered so that DIRECTIONS[d] == -DIRECTIONS[(d + 3) % 6].
DIRECTIONS = np.array(
    [(1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1)], dtype=np.int64
)


@dataclass(frozen=True)
class LatticeConfig:
    """Lattice side ``L`` (``N = L**2`` sites) and transmission range ``z``."""

    L: int
    z: int

    def __post_init__(self):
        if self.z < 1:
            raise InvalidParameterError(f"transmission range z must be >= 1, got {self.z}")
        if self.L < 2 * self.z + 1:
            raise InvalidParameterError(
                f"lattice side L={self.L} too small for range z={self.z} (need L >= 2z+1)"
            )

    @property
    def N(self) -> int:
        return self.L * self.L


class SiteCoord(NamedTuple):
    q: int
    r_ax: int


def axial_norm(dq: int, dr: int) -> int:
    """Graph distance of the offset ``(dq, dr)`` on the infinite lattice."""
    return (abs(dq) + abs(dr) + abs(dq + dr)) // 2


def wrap(coord, cfg: LatticeConfig | int) -> SiteCoord:
    """Reduce a raw integer pair into canonical ``[0, L)`` form."""
    L = cfg if isinstance(cfg, int) else cfg.L
    q, r = coord
    return SiteCoord(int(q) % L, int(r) % L)


def hex_distance(a, b, cfg: LatticeConfig | int) -> int:
    """Minimum graph distance between sites ``a`` and ``b`` on the torus."""
    L = cfg if isinstance(cfg, int) else cfg.L
    dq = a[0] - b[0]
    dr = a[1] - b[1]
    return min(
        axial_norm(dq + iq, dr + ir)
        for iq in (-L, 0, L)
        for ir in (-L, 0, L)
    )


@dataclass(frozen=True)
class NeighborhoodTable:
    """Offsets at hex distance ``1..z`` from the origin.

    ``offsets`` is an ``(size, 2)`` int64 array, ordered by distance and then
    lexicographically.  ``half`` holds one representative of every ``+-``
    pair, which is all a symmetric edge sweep needs.
    """

    z: int
    offsets: np.ndarray
    half: np.ndarray

    @property
    def size(self) -> int:
        return len(self.offsets)

    def __len__(self):
        return len(self.offsets)


_TABLES: dict[int, NeighborhoodTable] = {}


def neighborhood_offsets(z: int) -> NeighborhoodTable:
    if z < 1:
        raise InvalidParameterError(f"transmission range z must be >= 1, got {z}")
    table = _TABLES.get(z)
    if table is None:
        pairs = [
            (axial_norm(dq, dr), dq, dr)
            for dq in range(-z, z + 1)
            for dr in range(-z, z + 1)
            if 0 < axial_norm(dq, dr) <= z
        ]
        pairs.sort()
        offsets = np.array([(dq, dr) for _, dq, dr in pairs], dtype=np.int64)
        # lexicographically positive representative of each (+o, -o) pair
        keep = (offsets[:, 0] > 0) | ((offsets[:, 0] == 0) & (offsets[:, 1] > 0))
        offsets.setflags(write=False)
        half = offsets[keep].copy()
        half.setflags(write=False)
        table = NeighborhoodTable(z=z, offsets=offsets, half=half)
        _TABLES[z] = table
    return table
