"""Seeded Monte-Carlo ensembles over (z, sigma) and their aggregation.

Every realization draws from its own random substreams keyed by
``(seed, z, n0, realization)``, so results do not depend on how work is
split across processes.  Aggregates are built from per-realization integer
results sorted by realization index and summed with ``math.fsum``, which
makes merging associative, commutative and bit-reproducible.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .connectivity import components_burning
from .dynamics import Configuration, RngStream, node_count, random_placement, step, warm_up
from .errors import InfeasibleError, InvalidPlanError, MergeConflictError
from .lattice import LatticeConfig
from .netmetrics import DEFAULT_EPSILON, MetricsTable, node_metrics

__all__ = [
    "ExperimentPlan",
    "CurvePoint",
    "ConnectivityCurve",
    "CurveFragment",
    "default_workers",
    "realization",
    "connectivity_fragment",
    "run_connectivity_sweep",
    "run_metrics",
    "transition_grid",
    "merge",
]

WORKERS_ENV = "ADHOCNET_WORKERS"
DEFAULT_THRESHOLD = 0.9995
RESAMPLE_CAP = 100


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


@dataclass(frozen=True)
class ExperimentPlan:
    """Parameters of a sweep.

    ``sigma_grid=None`` asks for an automatic per-range grid concentrated on
    the transition (see :func:`transition_grid`).  ``warmup_steps=None``
    means ``L`` sweeps of the exclusion walk before each measurement.
    """

    L: int = 100
    z_list: tuple[int, ...] = (2, 3, 4, 5, 6)
    sigma_grid: tuple[float, ...] | None = None
    realizations: int = 300
    warmup_steps: int | None = None
    seed: int = 0
    mode: str = "independent"
    trajectory_stride: int = 1
    coarse_realizations: int = 20
    points_per_decade: int = 40

    def __post_init__(self):
        object.__setattr__(self, "z_list", tuple(int(z) for z in self.z_list))
        if self.sigma_grid is not None:
            object.__setattr__(self, "sigma_grid", tuple(float(s) for s in self.sigma_grid))
        self.validate()

    def validate(self) -> None:
        if not self.z_list:
            raise InvalidPlanError("z_list is empty")
        if min(self.z_list) < 1:
            raise InvalidPlanError("every z must be >= 1")
        if self.L < 2 * max(self.z_list) + 1:
            raise InvalidPlanError(
                f"L={self.L} too small for z={max(self.z_list)} (need L >= 2z+1)")
        if self.realizations < 1:
            raise InvalidPlanError("realizations must be >= 1")
        if self.sigma_grid is not None:
            g = self.sigma_grid
            if not g:
                raise InvalidPlanError("sigma_grid is empty")
            if any(not 0.0 < s <= 1.0 for s in g):
                raise InvalidPlanError("sigma_grid values must lie in (0, 1]")
            if any(b <= a for a, b in zip(g, g[1:])):
                raise InvalidPlanError("sigma_grid must be strictly increasing")
        if self.mode not in ("independent", "trajectory"):
            raise InvalidPlanError(f"unknown mode {self.mode!r}")
        if self.trajectory_stride < 1:
            raise InvalidPlanError("trajectory_stride must be >= 1")
        if self.warmup_steps is not None and self.warmup_steps < 0:
            raise InvalidPlanError("warmup_steps must be >= 0")

    @property
    def warmup(self) -> int:
        return self.L if self.warmup_steps is None else self.warmup_steps

    def to_dict(self) -> dict:
        d = asdict(self)
        d["z_list"] = list(self.z_list)
        d["sigma_grid"] = None if self.sigma_grid is None else list(self.sigma_grid)
        return d


@dataclass(frozen=True)
class CurvePoint:
    sigma: float
    eta_mean: float
    eta_stderr: float
    realizations: int
    p_global: float = float("nan")  # fraction of realizations with every node connected


@dataclass(frozen=True)
class ConnectivityCurve:
    z: int
    points: tuple[CurvePoint, ...]

    @property
    def sigma(self) -> np.ndarray:
        return np.array([p.sigma for p in self.points])

    @property
    def eta(self) -> np.ndarray:
        return np.array([p.eta_mean for p in self.points])

    @property
    def stderr(self) -> np.ndarray:
        return np.array([p.eta_stderr for p in self.points])


@dataclass
class CurveFragment:
    """Raw connectivity samples at one (z, sigma): realization -> (largest, n0)."""

    z: int
    sigma: float
    L: int
    samples: dict[int, tuple[int, int]] = field(default_factory=dict)

    @property
    def key(self) -> tuple:
        return (self.z, self.sigma, self.L)

    def merged(self, other: "CurveFragment") -> "CurveFragment":
        if self.key != other.key:
            raise MergeConflictError(f"cannot merge fragments {self.key} and {other.key}")
        out = dict(self.samples)
        for r, v in other.samples.items():
            if r in out and out[r] != v:
                raise MergeConflictError(f"realization {r} recorded twice with different values")
            out[r] = v
        return CurveFragment(self.z, self.sigma, self.L, out)

    def point(self) -> CurvePoint:
        rs = sorted(self.samples)
        n = len(rs)
        if n == 0:
            return CurvePoint(self.sigma, float("nan"), float("nan"), 0, float("nan"))
        x = [1.0 if self.samples[r][1] <= 1 else self.samples[r][0] / self.samples[r][1]
             for r in rs]
        mean = math.fsum(x) / n
        if n > 1:
            var = math.fsum((v - mean) ** 2 for v in x) / (n - 1)
            se = math.sqrt(var / n)
        else:
            se = 0.0
        full = sum(1 for r in rs if self.samples[r][0] == self.samples[r][1])
        return CurvePoint(self.sigma, min(max(mean, 0.0), 1.0), se, n, full / n)


def merge(partials: Iterable):
    """Pool MetricsTables or CurveFragments sharing the same parameters."""
    partials = [p for p in partials if p is not None]
    if not partials:
        raise MergeConflictError("nothing to merge")
    kinds = {type(p) for p in partials}
    if len(kinds) != 1:
        raise MergeConflictError(f"cannot merge mixed types {sorted(k.__name__ for k in kinds)}")
    out = partials[0]
    for p in partials[1:]:
        out = out.merged(p)
    return out


def _streams(seed: int, z: int, n0: int, r: int):
    place = RngStream(seed, r, "place", (z, n0))
    return place, place.sibling("move")


def realization(L: int, z: int, sigma: float, seed: int, r: int,
                warmup: int | None = None) -> Configuration:
    """Configuration of independent realization ``r`` after warm-up."""
    cfg = LatticeConfig(L, z)
    place, move = _streams(seed, z, node_count(sigma, cfg.N), r)
    config = random_placement(cfg, sigma, place)
    return warm_up(config, L if warmup is None else warmup, move)


def _trajectory(L, z, sigma, seed, warmup, stride, count):
    """Yield ``count`` snapshots of one long walk, ``stride`` sweeps apart."""
    cfg = LatticeConfig(L, z)
    place = RngStream(seed, 0, "place", (z, node_count(sigma, cfg.N)))
    config = random_placement(cfg, sigma, place)
    gen = place.sibling("trajectory").generator
    warm_up(config, warmup, gen)
    for r in range(count):
        if r:
            for _ in range(stride):
                step(config, gen)
        yield r, config


def _connectivity_task(args):
    L, z, sigma, seed, warmup, indices = args
    out = []
    for r in indices:
        rep = components_burning(realization(L, z, sigma, seed, r, warmup))
        out.append((r, rep.largest, rep.n0))
    return out


def _chunks(indices: Sequence[int], workers: int) -> list[list[int]]:
    if workers <= 1:
        return [list(indices)]
    size = max(1, math.ceil(len(indices) / (4 * workers)))
    return [list(indices[i:i + size]) for i in range(0, len(indices), size)]


def _run(func, tasks, workers):
    if workers <= 1 or len(tasks) <= 1:
        return [func(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, tasks))


def connectivity_fragment(plan: ExperimentPlan, z: int, sigma: float,
                          indices: Sequence[int] | None = None,
                          workers: int | None = None) -> CurveFragment:
    workers = default_workers() if workers is None else workers
    indices = range(plan.realizations) if indices is None else indices
    frag = CurveFragment(z, sigma, plan.L)
    if plan.mode == "trajectory":
        wanted = set(indices)
        for r, config in _trajectory(plan.L, z, sigma, plan.seed, plan.warmup,
                                     plan.trajectory_stride, max(wanted) + 1):
            if r in wanted:
                rep = components_burning(config)
                frag.samples[r] = (rep.largest, rep.n0)
        return frag
    tasks = [(plan.L, z, sigma, plan.seed, plan.warmup, c) for c in _chunks(indices, workers)]
    for part in _run(_connectivity_task, tasks, workers):
        for r, largest, n0 in part:
            frag.samples[r] = (largest, n0)
    return frag


def transition_grid(plan: ExperimentPlan, z: int, *, lo_eta: float = 0.05,
                    hi_eta: float = 0.999, workers: int | None = None) -> tuple[float, ...]:
    """Log-spaced occupancy grid bracketing the connectivity transition.

    An 8-point log scan over ``[0.005, 0.6]`` with ``plan.coarse_realizations``
    samples locates the last point below ``lo_eta`` and the first point at or
    above ``hi_eta``; the bracket is then filled with
    ``plan.points_per_decade`` points per decade.
    """
    coarse = np.geomspace(0.005, 0.6, 8)
    scout = ExperimentPlan(L=plan.L, z_list=(z,), sigma_grid=None,
                           realizations=plan.coarse_realizations,
                           warmup_steps=plan.warmup_steps, seed=plan.seed)
    eta = [connectivity_fragment(scout, z, float(s), workers=workers).point().eta_mean
           for s in coarse]
    below = [i for i, e in enumerate(eta) if e < lo_eta]
    i_lo = below[-1] if below else 0
    above = [i for i, e in enumerate(eta) if e >= hi_eta and i > i_lo]
    i_hi = above[0] if above else len(coarse) - 1
    lo, hi = coarse[i_lo], coarse[i_hi]
    n = int(math.ceil(plan.points_per_decade * math.log10(hi / lo))) + 1
    grid = np.geomspace(lo, hi, n)
    # distinct node counts only
    N = plan.L * plan.L
    out, seen = [], set()
    for s in grid:
        n0 = node_count(float(s), N)
        if n0 not in seen:
            seen.add(n0)
            out.append(float(s))
    return tuple(out)


def run_connectivity_sweep(plan: ExperimentPlan, workers: int | None = None
                           ) -> list[ConnectivityCurve]:
    """Connectivity curve eta(sigma) for every z in the plan."""
    plan.validate()
    curves = []
    for z in plan.z_list:
        grid = plan.sigma_grid if plan.sigma_grid is not None else transition_grid(
            plan, z, workers=workers)
        points = tuple(connectivity_fragment(plan, z, s, workers=workers).point() for s in grid)
        curves.append(ConnectivityCurve(z, points))
    return curves


def _metrics_task(args):
    L, z, sigma, seed, warmup, indices, threshold = args
    out = []
    for r in indices:
        config = realization(L, z, sigma, seed, r, warmup)
        if components_burning(config).fraction >= threshold:
            out.append((r, *node_metrics(config)))
        else:
            out.append((r, None, None, None))
    return out


def run_metrics(plan: ExperimentPlan, sigma: float, z: int,
                eta_threshold: float = DEFAULT_THRESHOLD,
                epsilon: float = DEFAULT_EPSILON,
                workers: int | None = None) -> MetricsTable:
    """Pool network metrics over realizations whose connectivity passes the filter.

    Realizations are examined in index order, ``plan.realizations`` at a
    time, until ``plan.realizations`` have been accepted; the first accepted
    ones by index are kept.  Gives up after ``100 * plan.realizations``
    attempts.
    """
    plan.validate()
    if not 0.0 <= eta_threshold <= 1.0:
        raise InvalidPlanError(f"eta_threshold must lie in [0, 1], got {eta_threshold}")
    LatticeConfig(plan.L, z)
    workers = default_workers() if workers is None else workers
    want = plan.realizations
    cap = RESAMPLE_CAP * want
    accepted: dict[int, tuple] = {}
    tried = 0
    if plan.mode == "trajectory":
        for r, config in _trajectory(plan.L, z, sigma, plan.seed, plan.warmup,
                                     plan.trajectory_stride, cap):
            tried = r + 1
            if components_burning(config).fraction >= eta_threshold:
                accepted[r] = node_metrics(config)
                if len(accepted) == want:
                    break
    else:
        while len(accepted) < want and tried < cap:
            batch = range(tried, min(tried + want, cap))
            tasks = [(plan.L, z, sigma, plan.seed, plan.warmup, c, eta_threshold)
                     for c in _chunks(batch, workers)]
            for part in _run(_metrics_task, tasks, workers):
                for r, deg, closed, nbr in part:
                    if deg is not None:
                        accepted[r] = (deg, closed, nbr)
            tried = batch.stop
    keep = sorted(accepted)[:want]
    if len(keep) < want:
        rate = len(accepted) / tried if tried else 0.0
        raise InfeasibleError(
            f"only {len(accepted)} of {tried} realizations at z={z}, sigma={sigma} reached "
            f"connectivity {eta_threshold} (acceptance rate {rate:.4g}); "
            f"{want} needed within the cap of {cap}", rate)
    attempts = keep[-1] + 1
    table = MetricsTable(z, sigma, plan.L, epsilon, eta_threshold,
                         realizations=want, attempts=attempts)
    for r in keep:
        table.add_nodes(*accepted[r])
    return table
