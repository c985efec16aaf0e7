"""Compiled inner loops.

Every kernel works on the same representation: ``grid`` is an ``(L, L)`` int32
array holding the node id at each site (``-1`` when empty) and ``pos`` is the
``(n0, 2)`` int64 array of node coordinates.  Random numbers are always drawn
by the caller so that results do not depend on the compiled code path.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def torus_hex_distance(q1, r1, q2, r2, L):
    dq = q1 - q2
    dr = r1 - r2
    best = L * 4
    for iq in (-L, 0, L):
        for ir in (-L, 0, L):
            a = dq + iq
            b = dr + ir
            d = (abs(a) + abs(b) + abs(a + b)) // 2
            if d < best:
                best = d
    return best


@njit(cache=True)
def exclusion_step(grid, pos, order, dirs, directions, L):
    """Random-sequential exclusion sweep; returns the number of moves made."""
    moved = 0
    for t in range(order.shape[0]):
        i = order[t]
        d = dirs[t]
        q = pos[i, 0]
        r = pos[i, 1]
        nq = (q + directions[d, 0]) % L
        nr = (r + directions[d, 1]) % L
        if grid[nq, nr] < 0:
            grid[q, r] = -1
            grid[nq, nr] = i
            pos[i, 0] = nq
            pos[i, 1] = nr
            moved += 1
    return moved


@njit(cache=True)
def burn_components(grid, pos, offsets, L):
    """Breadth-first burning over the range stencil.

    Returns ``(labels, sizes, probes)``; ``probes`` counts stencil lookups.
    """
    n0 = pos.shape[0]
    labels = np.full(n0, -1, dtype=np.int64)
    sizes = np.zeros(n0, dtype=np.int64)
    queue = np.empty(n0, dtype=np.int64)
    ncomp = 0
    probes = 0
    for seed in range(n0):
        if labels[seed] >= 0:
            continue
        labels[seed] = ncomp
        head = 0
        tail = 1
        queue[0] = seed
        while head < tail:
            i = queue[head]
            head += 1
            q = pos[i, 0]
            r = pos[i, 1]
            for k in range(offsets.shape[0]):
                probes += 1
                j = grid[(q + offsets[k, 0]) % L, (r + offsets[k, 1]) % L]
                if j >= 0 and labels[j] < 0:
                    labels[j] = ncomp
                    queue[tail] = j
                    tail += 1
        sizes[ncomp] = tail
        ncomp += 1
    return labels, sizes[:ncomp], probes


@njit(cache=True)
def _find(parent, x):
    root = x
    while parent[root] != root:
        root = parent[root]
    while parent[x] != root:
        nxt = parent[x]
        parent[x] = root
        x = nxt
    return root


@njit(cache=True)
def union_find_components(grid, pos, half_offsets, L):
    """Union by size with full path compression over the half stencil.

    Returns ``(roots, sizes)`` where ``roots[i]`` is the representative of
    node ``i`` and ``sizes`` lists the component sizes.
    """
    n0 = pos.shape[0]
    parent = np.arange(n0)
    size = np.ones(n0, dtype=np.int64)
    for i in range(n0):
        q = pos[i, 0]
        r = pos[i, 1]
        for k in range(half_offsets.shape[0]):
            j = grid[(q + half_offsets[k, 0]) % L, (r + half_offsets[k, 1]) % L]
            if j < 0:
                continue
            a = _find(parent, i)
            b = _find(parent, j)
            if a == b:
                continue
            if size[a] < size[b]:
                a, b = b, a
            parent[b] = a
            size[a] += size[b]
    roots = np.empty(n0, dtype=np.int64)
    count = 0
    for i in range(n0):
        roots[i] = _find(parent, i)
        if roots[i] == i:
            count += 1
    sizes = np.empty(count, dtype=np.int64)
    c = 0
    for i in range(n0):
        if roots[i] == i:
            sizes[c] = size[i]
            c += 1
    return roots, sizes


@njit(cache=True)
def node_metrics(grid, pos, offsets, L, z):
    """Per-node degree, closed neighbour pairs and summed neighbour degree."""
    n0 = pos.shape[0]
    K = offsets.shape[0]
    deg = np.zeros(n0, dtype=np.int64)
    nbrs = np.empty((n0, K), dtype=np.int64)
    for i in range(n0):
        q = pos[i, 0]
        r = pos[i, 1]
        c = 0
        for k in range(K):
            j = grid[(q + offsets[k, 0]) % L, (r + offsets[k, 1]) % L]
            if j >= 0:
                nbrs[i, c] = j
                c += 1
        deg[i] = c
    closed = np.zeros(n0, dtype=np.int64)
    nbr_deg = np.zeros(n0, dtype=np.int64)
    for i in range(n0):
        k = deg[i]
        s = 0
        t = 0
        for a in range(k):
            j = nbrs[i, a]
            s += deg[j]
            for b in range(a + 1, k):
                m = nbrs[i, b]
                if torus_hex_distance(pos[j, 0], pos[j, 1], pos[m, 0], pos[m, 1], L) <= z:
                    t += 1
        nbr_deg[i] = s
        closed[i] = t
    return deg, closed, nbr_deg
