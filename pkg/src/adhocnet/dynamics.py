"""Random placement and the exclusion random walk of mobile nodes."""

from __future__ import annotations

import io
import os
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import _kernels
from .errors import InvalidParameterError
from .lattice import DIRECTIONS, LatticeConfig, SiteCoord, wrap

__all__ = [
    "RngStream",
    "Configuration",
    "node_count",
    "random_placement",
    "step",
    "warm_up",
    "occupancy",
    "save_sites",
    "load_sites",
]

_PURPOSES = {"place": 0, "move": 1, "trajectory": 2}


@dataclass(frozen=True)
class RngStream:
    """Named substream of a master seed.

    The stream identity is ``(context, realization, purpose)``; ``context``
    carries the sweep coordinates (the ensemble layer uses ``(z, n0)``).
    Equal identities always yield the same draw sequence.
    """

    seed: int
    realization: int = 0
    purpose: str = "place"
    context: tuple = ()

    def __post_init__(self):
        if self.purpose not in _PURPOSES:
            raise InvalidParameterError(f"unknown rng purpose {self.purpose!r}")

    @cached_property
    def generator(self) -> np.random.Generator:
        key = (*self.context, self.realization, _PURPOSES[self.purpose])
        ss = np.random.SeedSequence(self.seed, spawn_key=key)
        return np.random.Generator(np.random.PCG64(ss))

    def sibling(self, purpose: str) -> "RngStream":
        return RngStream(self.seed, self.realization, purpose, self.context)


def _generator(rng) -> np.random.Generator:
    if isinstance(rng, RngStream):
        return rng.generator
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


@dataclass
class Configuration:
    """Node positions plus the site -> node lookup grid.

    ``positions[i]`` is the ``(q, r)`` site of node ``i``; ``grid[q, r]`` is the
    id of the node there or ``-1``.  Both are kept consistent by every mutator.
    """

    cfg: LatticeConfig
    positions: np.ndarray
    grid: np.ndarray = field(repr=False)

    @classmethod
    def empty(cls, cfg: LatticeConfig) -> "Configuration":
        return cls(cfg, np.zeros((0, 2), dtype=np.int64),
                   np.full((cfg.L, cfg.L), -1, dtype=np.int32))

    @classmethod
    def from_positions(cls, cfg: LatticeConfig, positions) -> "Configuration":
        pos = np.asarray(positions, dtype=np.int64).reshape(-1, 2) % cfg.L
        grid = np.full((cfg.L, cfg.L), -1, dtype=np.int32)
        if len(pos):
            flat = pos[:, 0] * cfg.L + pos[:, 1]
            if len(np.unique(flat)) != len(flat):
                raise InvalidParameterError("two nodes placed on the same site")
            grid[pos[:, 0], pos[:, 1]] = np.arange(len(pos), dtype=np.int32)
        return cls(cfg, np.ascontiguousarray(pos), grid)

    @property
    def n0(self) -> int:
        return len(self.positions)

    @property
    def L(self) -> int:
        return self.cfg.L

    def node_at(self, site) -> int | None:
        q, r = wrap(site, self.cfg)
        i = int(self.grid[q, r])
        return None if i < 0 else i

    def sites(self) -> list[SiteCoord]:
        return [SiteCoord(int(q), int(r)) for q, r in self.positions]

    def copy(self) -> "Configuration":
        return Configuration(self.cfg, self.positions.copy(), self.grid.copy())

    def with_range(self, z: int) -> "Configuration":
        """Same node placement viewed with transmission range ``z``."""
        return Configuration(LatticeConfig(self.cfg.L, z), self.positions, self.grid)

    def translated(self, dq: int, dr: int) -> "Configuration":
        return Configuration.from_positions(self.cfg, self.positions + (dq, dr))

    def with_node(self, site) -> "Configuration":
        if self.node_at(site) is not None:
            raise InvalidParameterError(f"site {tuple(site)} already occupied")
        return Configuration.from_positions(
            self.cfg, np.vstack([self.positions, np.asarray(site, dtype=np.int64)])
        )

    def check(self) -> None:
        """Raise AssertionError if positions and grid disagree."""
        L = self.cfg.L
        assert np.all((self.positions >= 0) & (self.positions < L))
        ids = self.grid[self.positions[:, 0], self.positions[:, 1]]
        assert np.array_equal(ids, np.arange(self.n0)), "grid/positions mismatch"
        assert np.count_nonzero(self.grid >= 0) == self.n0, "stray grid entries"


def node_count(sigma: float, N: int) -> int:
    """``round(sigma * N)`` with ties to even."""
    if not 0.0 <= sigma <= 1.0:
        raise InvalidParameterError(f"occupancy must lie in [0, 1], got {sigma}")
    return int(round(sigma * N))


def random_placement(cfg: LatticeConfig, sigma: float, rng) -> Configuration:
    gen = _generator(rng)
    n0 = node_count(sigma, cfg.N)
    flat = gen.choice(cfg.N, size=n0, replace=False) if n0 else np.zeros(0, np.int64)
    pos = np.stack(np.divmod(flat.astype(np.int64), cfg.L), axis=1)
    return Configuration.from_positions(cfg, pos)


def step(config: Configuration, rng) -> Configuration:
    """One sweep: every node, in fresh random order, tries one unit move.

    A move onto an occupied site is rejected and the node stays put.  The
    configuration is updated in place and returned.
    """
    n0 = config.n0
    if n0 == 0:
        return config
    gen = _generator(rng)
    order = gen.permutation(n0)
    dirs = gen.integers(0, 6, size=n0)
    _kernels.exclusion_step(config.grid, config.positions, order, dirs, DIRECTIONS, config.L)
    return config


def warm_up(config: Configuration, steps: int, rng) -> Configuration:
    gen = _generator(rng)
    for _ in range(steps):
        step(config, gen)
    return config


def occupancy(config: Configuration) -> float:
    return config.n0 / config.cfg.N


def save_sites(config: Configuration, dest, seed: int | None = None) -> None:
    """Write a plain-text site list: a header, then one ``q r`` line per node."""
    lines = [f"# L={config.L} z={config.cfg.z} seed={'' if seed is None else seed}",
             f"# n0={config.n0}"]
    lines += [f"{q} {r}" for q, r in config.positions]
    text = "\n".join(lines) + "\n"
    if isinstance(dest, (str, os.PathLike)):
        with open(dest, "w") as fh:
            fh.write(text)
    else:
        dest.write(text)


def load_sites(src) -> tuple[Configuration, int | None]:
    if isinstance(src, (str, os.PathLike)):
        with open(src) as fh:
            text = fh.read()
    else:
        text = src.read()
    header = {}
    rows = []
    for line in io.StringIO(text):
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            for tok in line[1:].split():
                key, _, val = tok.partition("=")
                header[key] = val
            continue
        q, r = line.split()
        rows.append((int(q), int(r)))
    cfg = LatticeConfig(int(header["L"]), int(header["z"]))
    seed = int(header["seed"]) if header.get("seed") else None
    return Configuration.from_positions(cfg, np.array(rows, dtype=np.int64).reshape(-1, 2)), seed
