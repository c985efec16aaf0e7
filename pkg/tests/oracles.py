"""Brute-force reference computations used only by the tests.

Nothing here calls the closed-form hex metric or the compiled kernels:
distances come from breadth-first search over the six unit moves on the
wrapped lattice, and components from boolean transitive closure.
"""

from collections import deque

import numpy as np

MOVES = [(1, 0), (-1, 0), (0, 1), (0, -1), (1, -1), (-1, 1)]


def bfs_distances(L, source):
    """Graph distance from ``source`` to every site of the wrapped L x L lattice."""
    dist = np.full((L, L), -1, dtype=np.int64)
    dist[source] = 0
    queue = deque([source])
    while queue:
        q, r = queue.popleft()
        for dq, dr in MOVES:
            t = ((q + dq) % L, (r + dr) % L)
            if dist[t] < 0:
                dist[t] = dist[q, r] + 1
                queue.append(t)
    return dist


def all_pairs_bfs(L):
    """``D[q1, r1, q2, r2]`` graph distance for every site pair."""
    D = np.empty((L, L, L, L), dtype=np.int64)
    for q in range(L):
        for r in range(L):
            D[q, r] = bfs_distances(L, (q, r))
    return D


def pairwise_distance(positions, L, D=None):
    D = all_pairs_bfs(L) if D is None else D
    p = np.asarray(positions)
    return D[p[:, 0][:, None], p[:, 1][:, None], p[:, 0][None, :], p[:, 1][None, :]]


def reachability_components(positions, L, z, D=None):
    """Component sizes by Floyd-Warshall style boolean closure."""
    n = len(positions)
    if n == 0:
        return ()
    dist = pairwise_distance(positions, L, D)
    reach = dist <= z
    for k in range(n):
        reach |= reach[:, k:k + 1] & reach[k:k + 1, :]
    seen = np.zeros(n, dtype=bool)
    sizes = []
    for i in range(n):
        if not seen[i]:
            members = reach[i]
            seen |= members
            sizes.append(int(members.sum()))
    return tuple(sorted(sizes, reverse=True))


def brute_metrics(positions, L, z, D=None):
    """Per-node degree, closed neighbour pairs and neighbour-degree sum by explicit loops."""
    n = len(positions)
    dist = pairwise_distance(positions, L, D) if n else np.zeros((0, 0))
    adj = [[j for j in range(n) if j != i and dist[i, j] <= z] for i in range(n)]
    deg = [len(a) for a in adj]
    closed = []
    for i in range(n):
        t = 0
        for a in range(len(adj[i])):
            for b in range(a + 1, len(adj[i])):
                if dist[adj[i][a], adj[i][b]] <= z:
                    t += 1
        closed.append(t)
    nbr = [sum(deg[j] for j in adj[i]) for i in range(n)]
    return deg, closed, nbr
