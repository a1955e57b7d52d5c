"""Shared graph primitives: CSR adjacency, BFS distance fields, geodesics.

Vertices are integer ids.  Deterministic tie-breaking everywhere: neighbor
lists are stored in a canonical order (generator order for Cayley balls)
and the "BFS-first" geodesic is the path through the breadth-first tree
that explores neighbors in that order, parenting each vertex to its first
discoverer.
"""

from __future__ import annotations

from collections import deque

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra


def adjacency_csr(num_vertices, edge_pairs):
    """Symmetric unweighted CSR matrix from an iterable of (u, v) pairs."""
    rows = []
    cols = []
    for u, v in edge_pairs:
        rows.append(u)
        cols.append(v)
        rows.append(v)
        cols.append(u)
    data = np.ones(len(rows), dtype=np.int8)
    return csr_matrix(
        (data, (np.array(rows, dtype=np.int64), np.array(cols, dtype=np.int64))),
        shape=(num_vertices, num_vertices),
    )


def distance_field(csr, sources):
    """Min distance from the source set to every vertex (inf if unreachable)."""
    indices = [sources] if np.isscalar(sources) else list(sources)
    return dijkstra(csr, directed=False, unweighted=True, indices=indices, min_only=True)


def dijkstra_rows(csr, sources):
    """One full distance row per source vertex."""
    return dijkstra(csr, directed=False, unweighted=True, indices=list(sources))


def bfs_tree(neighbor_lists, source):
    """Breadth-first parents and distances with canonical neighbor order.

    Returns (parent, dist) lists; parent[source] = -1, unreachable = -2.
    """
    n = len(neighbor_lists)
    parent = [-2] * n
    dist = [-1] * n
    parent[source] = -1
    dist[source] = 0
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for v in neighbor_lists[u]:
            if parent[v] == -2:
                parent[v] = u
                dist[v] = dist[u] + 1
                queue.append(v)
    return parent, dist


def path_from_parents(parent, source, target):
    path = [target]
    while path[-1] != source:
        prev = parent[path[-1]]
        if prev < 0:
            raise ValueError("target not reachable from source")
        path.append(prev)
    path.reverse()
    return path


def bfs_distance(neighbor_lists, source, target=None, forbidden=None):
    """Plain BFS distance; -1 when unreachable.  ``forbidden`` vertices are removed."""
    if forbidden and source in forbidden:
        return -1
    dist = {source: 0}
    queue = deque([source])
    while queue:
        u = queue.popleft()
        if u == target:
            return dist[u]
        for v in neighbor_lists[u]:
            if v not in dist and (not forbidden or v not in forbidden):
                dist[v] = dist[u] + 1
                queue.append(v)
    if target is None:
        return dist
    return -1


def count_geodesics(neighbor_lists, dist_u, dist_v, u, v):
    """Number of geodesics u -> v, capped lazily by the caller via enumeration."""
    total = int(dist_u[v])
    if total < 0:
        return 0
    counts = {u: 1}
    order = [u]
    # process vertices on the shortest-path DAG by distance layers
    layer = [u]
    for step in range(total):
        nxt = {}
        for w in layer:
            for x in neighbor_lists[w]:
                if dist_u[x] == dist_u[w] + 1 and dist_u[x] + dist_v[x] == total:
                    nxt[x] = nxt.get(x, 0) + counts[w]
        counts.update(nxt)
        layer = list(nxt)
    return counts.get(v, 0)


def enumerate_geodesics(neighbor_lists, dist_u, dist_v, u, v, cap=10000):
    """All geodesic vertex paths u -> v, in canonical neighbor order.

    Returns (paths, truncated): truncated is True when the cap stopped the
    enumeration.
    """
    total = int(dist_u[v])
    if total < 0:
        return [], False
    paths = []
    stack = [(u, [u])]
    truncated = False
    while stack:
        w, path = stack.pop()
        if w == v:
            paths.append(path)
            if len(paths) >= cap:
                truncated = bool(stack)
                break
            continue
        # push in reverse so canonical order pops first
        succs = [
            x
            for x in neighbor_lists[w]
            if dist_u[x] == dist_u[w] + 1 and int(dist_u[x]) + int(dist_v[x]) == total
        ]
        for x in reversed(succs):
            stack.append((x, path + [x]))
    return paths, truncated


def hausdorff_between(csr, set_a, set_b):
    """Exact Hausdorff distance between two vertex sets in graph metric."""
    from_b = distance_field(csr, sorted(set_b))
    from_a = distance_field(csr, sorted(set_a))
    d1 = max(from_b[list(set_a)]) if set_a else float("inf")
    d2 = max(from_a[list(set_b)]) if set_b else float("inf")
    value = max(d1, d2)
    if np.isinf(value):
        return float("inf")
    return int(value)
