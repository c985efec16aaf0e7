"""Connected components of the range-z communication graph.

Two independent labelings are provided: a breadth-first burning sweep over
the full neighbourhood stencil and a union-find pass over half the stencil.
They must always agree; the ensemble layer uses burning.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .dynamics import Configuration
from .lattice import neighborhood_offsets

__all__ = [
    "ComponentReport",
    "components_burning",
    "components_unionfind",
    "connectivity_sample",
]


@dataclass(frozen=True)
class ComponentReport:
    sizes: tuple[int, ...]  # descending
    n0: int
    probes: int = 0  # stencil lookups made, burning only

    @property
    def largest(self) -> int:
        return self.sizes[0] if self.sizes else 0

    @property
    def fraction(self) -> float:
        """Largest component over n0, with 1 for n0 <= 1."""
        if self.n0 <= 1:
            return 1.0
        return self.largest / self.n0

    def same_partition(self, other: "ComponentReport") -> bool:
        return self.n0 == other.n0 and self.sizes == other.sizes


def _report(sizes, n0, probes=0) -> ComponentReport:
    return ComponentReport(tuple(sorted((int(s) for s in sizes), reverse=True)), n0, int(probes))


def components_burning(config: Configuration) -> ComponentReport:
    if config.n0 == 0:
        return ComponentReport((), 0)
    offsets = neighborhood_offsets(config.cfg.z).offsets
    _, sizes, probes = _kernels.burn_components(config.grid, config.positions, offsets, config.L)
    return _report(sizes, config.n0, probes)


def components_unionfind(config: Configuration) -> ComponentReport:
    if config.n0 == 0:
        return ComponentReport((), 0)
    half = neighborhood_offsets(config.cfg.z).half
    _, sizes = _kernels.union_find_components(config.grid, config.positions, half, config.L)
    return _report(sizes, config.n0)


def connectivity_sample(config: Configuration) -> float:
    """Fraction of nodes in the largest component (``n / n0``)."""
    return components_burning(config).fraction


def component_labels(config: Configuration) -> np.ndarray:
    """Component id of each node, in burning discovery order."""
    if config.n0 == 0:
        return np.zeros(0, dtype=np.int64)
    offsets = neighborhood_offsets(config.cfg.z).offsets
    labels, _, _ = _kernels.burn_components(config.grid, config.positions, offsets, config.L)
    return labels
