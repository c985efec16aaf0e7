import numpy as np
import pytest
from hypothesis import given, strategies as st

from adhocnet.errors import InvalidParameterError
from adhocnet.lattice import (DIRECTIONS, LatticeConfig, SiteCoord, hex_distance,
                              neighborhood_offsets, wrap)
from oracles import bfs_distances


def test_identity_and_unit_edge():
    cfg = LatticeConfig(10, 1)
    assert hex_distance((3, 4), (3, 4), cfg) == 0
    assert hex_distance((0, 0), (1, 0), cfg) == 1


def test_wrapped_neighbour_matches_bfs():
    # BFS on the wrapped 10x10 lattice gives 1 for (0,0) -> (9,0)
    assert bfs_distances(10, (0, 0))[9, 0] == 1
    assert hex_distance((0, 0), (9, 0), LatticeConfig(10, 1)) == 1


@pytest.mark.parametrize("z, size", [(1, 6), (2, 18), (3, 36)])
def test_neighborhood_sizes(z, size):
    assert neighborhood_offsets(z).size == size


def test_neighborhood_z3_matches_bfs_ball():
    dist = bfs_distances(15, (7, 7))
    ball = {(q - 7, r - 7) for q, r in zip(*np.nonzero((dist >= 1) & (dist <= 3)))}
    assert len(ball) == 36
    assert ball == {tuple(o) for o in neighborhood_offsets(3).offsets}


def test_neighborhood_zero_range_rejected():
    with pytest.raises(InvalidParameterError):
        neighborhood_offsets(0)


@pytest.mark.parametrize("z", range(1, 7))
def test_neighborhood_invariants(z):
    table = neighborhood_offsets(z)
    offs = {tuple(o) for o in table.offsets}
    assert len(offs) == table.size == 3 * z * (z + 1)
    assert (0, 0) not in offs
    assert offs == {(-a, -b) for a, b in offs}
    half = {tuple(o) for o in table.half}
    assert len(half) * 2 == table.size
    assert half | {(-a, -b) for a, b in half} == offs


@pytest.mark.parametrize("raw, expected", [((0, 0), (0, 0)), ((-1, 10), (9, 0)), ((23, -7), (3, 3))])
def test_wrap(raw, expected):
    assert wrap(raw, LatticeConfig(10, 1)) == SiteCoord(*expected)


@given(st.integers(-10**6, 10**6), st.integers(-10**6, 10**6), st.integers(3, 50))
def test_wrap_idempotent(q, r, L):
    w = wrap((q, r), L)
    assert wrap(w, L) == w
    assert 0 <= w.q < L and 0 <= w.r_ax < L


def test_directions_are_unit_and_paired():
    assert all(hex_distance((0, 0), d, 10) == 1 for d in DIRECTIONS)
    for d in range(6):
        assert np.array_equal(DIRECTIONS[d], -DIRECTIONS[(d + 3) % 6])


def test_config_invariants():
    with pytest.raises(InvalidParameterError):
        LatticeConfig(4, 2)
    with pytest.raises(InvalidParameterError):
        LatticeConfig(10, 0)
    assert LatticeConfig(5, 2).N == 25


@pytest.mark.parametrize("L", [5, 7, 8, 11])
def test_closed_form_equals_bfs_exhaustive(L):
    for q in range(L):
        for r in range(L):
            dist = bfs_distances(L, (q, r))
            for q2 in range(L):
                for r2 in range(L):
                    assert hex_distance((q, r), (q2, r2), L) == dist[q2, r2]


sites = st.tuples(st.integers(0, 11), st.integers(0, 11))


@given(sites, sites, sites)
def test_metric_axioms(a, b, c):
    L = 12
    assert hex_distance(a, b, L) == hex_distance(b, a, L)
    assert (hex_distance(a, b, L) == 0) == (a == b)
    assert hex_distance(a, c, L) <= hex_distance(a, b, L) + hex_distance(b, c, L)


@pytest.mark.parametrize("L, z", [(7, 3), (9, 4), (12, 2)])
def test_stencil_applied_anywhere_gives_distinct_sites(L, z):
    offs = neighborhood_offsets(z).offsets
    for q in range(L):
        for r in range(L):
            hit = {wrap((q + a, r + b), L) for a, b in offs}
            assert len(hit) == 3 * z * (z + 1)
            assert (q, r) not in hit
