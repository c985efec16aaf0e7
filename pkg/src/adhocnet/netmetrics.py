"""Network observables of a configuration: p(k), <k>, C(k), k_nn(k), k_c.

Per-degree quantities are accumulated as exact integer sums so that tables
from different realizations pool without rounding:

* ``counts[k]``   number of nodes with degree k
* ``closed[k]``   closed neighbour pairs summed over those nodes
* ``nbr_deg[k]``  neighbour degrees summed over those nodes

Because every node of degree k has the same pair count ``k (k - 1) / 2``,
``C(k) = closed[k] / (counts[k] k (k - 1) / 2)`` is exactly the mean of the
per-node clustering coefficients, and likewise for ``k_nn``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .dynamics import Configuration
from .errors import InvalidParameterError, MergeConflictError
from .lattice import neighborhood_offsets

__all__ = [
    "DEFAULT_EPSILON",
    "DegreeDistribution",
    "MetricsTable",
    "node_metrics",
    "degree_sequence",
    "mean_degree",
    "clustering_by_degree",
    "knn_by_degree",
    "cutoff_degree",
    "pooled_distribution",
    "measure",
]

DEFAULT_EPSILON = 1e-3


@dataclass(frozen=True)
class DegreeDistribution:
    p: dict[int, float]
    kmax: int
    samples: int

    @classmethod
    def from_counts(cls, counts) -> "DegreeDistribution":
        counts = np.asarray(counts, dtype=np.int64)
        total = int(counts.sum())
        ks = np.flatnonzero(counts)
        p = {int(k): int(counts[k]) / total for k in ks}
        return cls(p, int(ks[-1]) if len(ks) else 0, total)

    def tail(self, k: int) -> float:
        """Probability of a degree strictly above ``k``."""
        return math.fsum(v for kk, v in self.p.items() if kk > k)

    def mean(self) -> float:
        return math.fsum(k * v for k, v in self.p.items())


def cutoff_degree(dist: DegreeDistribution, epsilon: float = DEFAULT_EPSILON) -> int:
    """Smallest k whose upper tail ``P(K > k)`` falls below ``epsilon``."""
    if not 0.0 < epsilon < 1.0:
        raise InvalidParameterError(f"epsilon must lie in (0, 1), got {epsilon}")
    for k in range(dist.kmax + 1):
        if dist.tail(k) < epsilon:
            return k
    return dist.kmax


def pooled_distribution(tables) -> DegreeDistribution:
    """Node-weighted degree distribution over tables with any ranges."""
    tables = list(tables)
    n = max((len(t.counts) for t in tables), default=1)
    counts = np.zeros(n, dtype=np.int64)
    for t in tables:
        counts[:len(t.counts)] += t.counts
    return DegreeDistribution.from_counts(counts)


def node_metrics(config: Configuration):
    """Per-node ``(degree, closed_pairs, neighbour_degree_sum)`` int arrays."""
    if config.n0 == 0:
        empty = np.zeros(0, dtype=np.int64)
        return empty, empty.copy(), empty.copy()
    offsets = neighborhood_offsets(config.cfg.z).offsets
    return _kernels.node_metrics(config.grid, config.positions, offsets,
                                 config.L, config.cfg.z)


def degree_sequence(config: Configuration) -> list[int]:
    return node_metrics(config)[0].tolist()


def mean_degree(config: Configuration) -> float:
    if config.n0 == 0:
        return 0.0
    return float(np.mean(node_metrics(config)[0]))


@dataclass
class MetricsTable:
    z: int
    sigma: float
    L: int
    epsilon: float = DEFAULT_EPSILON
    threshold: float = 0.0
    counts: np.ndarray = field(default=None, repr=False)
    closed: np.ndarray = field(default=None, repr=False)
    nbr_deg: np.ndarray = field(default=None, repr=False)
    realizations: int = 0
    attempts: int = 0

    def __post_init__(self):
        K = 3 * self.z * (self.z + 1)
        for name in ("counts", "closed", "nbr_deg"):
            if getattr(self, name) is None:
                setattr(self, name, np.zeros(K + 1, dtype=np.int64))

    @property
    def key(self) -> tuple:
        return (self.z, self.sigma, self.L, self.epsilon, self.threshold)

    def add_nodes(self, deg, closed, nbr_deg) -> None:
        np.add.at(self.counts, deg, 1)
        np.add.at(self.closed, deg, closed)
        np.add.at(self.nbr_deg, deg, nbr_deg)

    def merged(self, other: "MetricsTable") -> "MetricsTable":
        if self.key != other.key:
            raise MergeConflictError(f"cannot merge tables {self.key} and {other.key}")
        return MetricsTable(
            *self.key,
            counts=self.counts + other.counts,
            closed=self.closed + other.closed,
            nbr_deg=self.nbr_deg + other.nbr_deg,
            realizations=self.realizations + other.realizations,
            attempts=self.attempts + other.attempts,
        )

    @property
    def acceptance_rate(self) -> float:
        return self.realizations / self.attempts if self.attempts else 1.0

    @property
    def distribution(self) -> DegreeDistribution:
        return DegreeDistribution.from_counts(self.counts)

    @property
    def mean_degree(self) -> float:
        n = int(self.counts.sum())
        if n == 0:
            return 0.0
        return int(np.dot(np.arange(len(self.counts)), self.counts)) / n

    @property
    def clustering(self) -> dict[int, float]:
        return {
            k: int(self.closed[k]) / (int(self.counts[k]) * (k * (k - 1) // 2))
            for k in range(2, len(self.counts))
            if self.counts[k]
        }

    @property
    def knn(self) -> dict[int, float]:
        return {
            k: int(self.nbr_deg[k]) / (int(self.counts[k]) * k)
            for k in range(1, len(self.counts))
            if self.counts[k]
        }

    @property
    def k_c(self) -> int:
        return cutoff_degree(self.distribution, self.epsilon)

    def clustering_plateau(self, k_lo: int = 4, k_hi: int | None = None) -> tuple[float, float]:
        """Node-weighted mean of C(k) over ``k_lo..k_hi`` and its max deviation."""
        k_hi = self.k_c if k_hi is None else k_hi
        C = self.clustering
        ks = [k for k in range(k_lo, k_hi + 1) if k in C]
        if not ks:
            return float("nan"), float("nan")
        closed = sum(int(self.closed[k]) for k in ks)
        pairs = sum(int(self.counts[k]) * (k * (k - 1) // 2) for k in ks)
        level = closed / pairs
        return level, max(abs(C[k] - level) for k in ks)


def measure(config: Configuration, *, sigma: float | None = None,
            epsilon: float = DEFAULT_EPSILON, threshold: float = 0.0) -> MetricsTable:
    """Metrics table of a single configuration."""
    sigma = config.n0 / config.cfg.N if sigma is None else sigma
    table = MetricsTable(config.cfg.z, sigma, config.L, epsilon, threshold,
                         realizations=1, attempts=1)
    table.add_nodes(*node_metrics(config))
    return table


def clustering_by_degree(config: Configuration) -> dict[int, float]:
    return measure(config).clustering


def knn_by_degree(config: Configuration) -> dict[int, float]:
    return measure(config).knn
