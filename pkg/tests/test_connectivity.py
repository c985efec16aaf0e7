import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from adhocnet.connectivity import (components_burning, components_unionfind,
                                   connectivity_sample)
from adhocnet.dynamics import Configuration, RngStream, random_placement
from adhocnet.lattice import LatticeConfig, neighborhood_offsets
from oracles import reachability_components

BOTH = [components_burning, components_unionfind]


@pytest.mark.parametrize("algo", BOTH)
def test_empty(algo):
    rep = algo(Configuration.empty(LatticeConfig(10, 2)))
    assert rep.sizes == () and rep.largest == 0 and rep.n0 == 0


@pytest.mark.parametrize("algo", BOTH)
@pytest.mark.parametrize("z", [1, 2, 3])
def test_range_boundary(algo, z):
    cfg = LatticeConfig(20, z)
    at_range = Configuration.from_positions(cfg, [(0, 0), (z, 0)])
    assert algo(at_range).sizes == (2,)
    beyond = Configuration.from_positions(cfg, [(0, 0), (z + 1, 0)])
    assert algo(beyond).sizes == (1, 1)
    # across the periodic boundary
    wrapped = Configuration.from_positions(cfg, [(0, 0), (20 - z, z)])
    assert algo(wrapped).sizes == (2,)


@pytest.mark.parametrize("algo", BOTH)
def test_random_20_nodes_match_oracle(algo, bfs12):
    config = random_placement(LatticeConfig(12, 2), 20 / 144, RngStream(31))
    assert config.n0 == 20
    expected = reachability_components(config.positions, 12, 2, bfs12)
    assert algo(config).sizes == expected


def test_many_random_instances_agree_with_oracle(bfs12):
    gen = np.random.default_rng(5)
    for _ in range(60):
        z = int(gen.integers(1, 4))
        sigma = float(gen.uniform(0.02, 0.4))
        config = random_placement(LatticeConfig(12, z), sigma, gen)
        expected = reachability_components(config.positions, 12, z, bfs12)
        assert components_burning(config).sizes == expected
        assert components_unionfind(config).sizes == expected


def test_connectivity_sample_conventions():
    cfg = LatticeConfig(10, 3)
    assert connectivity_sample(random_placement(cfg, 1.0, 0)) == 1.0
    assert connectivity_sample(Configuration.from_positions(LatticeConfig(20, 1),
                                                            [(0, 0), (5, 5)])) == 0.5
    assert connectivity_sample(Configuration.from_positions(cfg, [(4, 4)])) == 1.0
    assert connectivity_sample(Configuration.empty(cfg)) == 1.0


def test_probe_budget_at_full_scale():
    config = random_placement(LatticeConfig(200, 6), 0.1, RngStream(1))
    rep = components_burning(config)
    assert rep.probes == config.n0 * 126
    assert rep.probes <= config.n0 * 3 * 6 * 7


configs = st.builds(
    lambda L, z, sigma, seed: random_placement(LatticeConfig(L, z), sigma, seed),
    st.sampled_from([8, 12]), st.integers(1, 3), st.floats(0.05, 0.9), st.integers(0, 2**32),
)


@settings(max_examples=60, deadline=None)
@given(configs, st.integers(-20, 20), st.integers(-20, 20))
def test_translation_invariance(config, dq, dr):
    moved = config.translated(dq, dr)
    assert connectivity_sample(moved) == connectivity_sample(config)
    assert components_burning(moved).sizes == components_burning(config).sizes


@settings(max_examples=60, deadline=None)
@given(configs, st.integers(0, 10**6))
def test_adding_a_node_never_shrinks_largest(config, pick):
    empty = np.argwhere(config.grid < 0)
    if len(empty) == 0:
        return
    site = tuple(empty[pick % len(empty)])
    assert components_burning(config.with_node(site)).largest >= components_burning(config).largest


@settings(max_examples=80, deadline=None)
@given(configs)
def test_burning_equals_unionfind(config):
    assert components_burning(config).same_partition(components_unionfind(config))


def test_half_stencil_used_by_unionfind_is_sufficient():
    # an edge along every offset direction must be found
    for z in (1, 2, 3):
        cfg = LatticeConfig(15, z)
        for dq, dr in neighborhood_offsets(z).offsets:
            config = Configuration.from_positions(cfg, [(7, 7), (7 + dq, 7 + dr)])
            assert components_unionfind(config).sizes == (2,)
