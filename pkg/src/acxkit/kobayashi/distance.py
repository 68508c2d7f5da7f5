"""Integrated Kobayashi pseudodistance by shortest paths on a planar lattice.

The lattice lives in the complex line through ``p`` and ``q``. Every edge
``x -> x'`` of the 8-neighbour graph carries the weight
``K((x + x')/2, x' - x)``, the metric upper bound at the midpoint, so each
lattice polyline is an upper estimate of the length of a piecewise linear
path and the graph distance converges from above as the lattice refines.
"""
from dataclasses import dataclass

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import dijkstra

from .._validation import as_point, check_int, to_real
from ..errors import ConnectivityError, RegionError
from .metric import SearchConfig, kr_metric

_STEPS = ((1, 0), (0, 1), (1, 1), (1, -1))


@dataclass
class LatticePath:
    length: float
    nodes: np.ndarray
    n_edges: int
    n_queries: int


def _canonical(p, q):
    a, b = tuple(to_real(p)), tuple(to_real(q))
    return (p, q) if a <= b else (q, p)


def kr_distance(domain, structure, p, q, lattice_n=32, margin=None, width=None, cfg=None,
                return_path=False):
    """Shortest-path estimate of the Kobayashi distance from ``p`` to ``q``.

    Parameters
    ----------
    lattice_n : int
        Number of lattice steps between ``p`` and ``q``.
    margin : int, optional
        Extra steps before ``p`` and beyond ``q`` along the segment
        (default ``max(1, lattice_n // 8)``).
    width : int, optional
        Half-width of the lattice in the ``i (q - p)`` direction (default
        ``margin``).

    Raises
    ------
    ConnectivityError
        ``q`` cannot be reached from ``p`` inside the domain.
    """
    p, q = as_point(p), as_point(q)
    if np.array_equal(p, q):
        return LatticePath(0.0, p[None], 0, 0) if return_path else 0.0
    for x in (p, q):
        if not np.all(domain.contains(x, tol=-1e-15)):
            raise RegionError("endpoints must be interior points of the domain")
    n = check_int("lattice_n", lattice_n, 1)
    m = max(1, n // 8) if margin is None else check_int("margin", margin, 0)
    w = m if width is None else check_int("width", width, 0)
    cfg = cfg or SearchConfig()
    a, b = _canonical(p, q)
    step = (b - a) / n
    ii, jj = np.meshgrid(np.arange(-m, n + m + 1), np.arange(-w, w + 1), indexing="ij")
    nodes = a + (ii + 1j * jj)[..., None] * step
    inside = domain.contains(nodes, tol=-1e-15)
    index = -np.ones(ii.shape, dtype=int)
    index[inside] = np.arange(int(inside.sum()))
    flat = nodes[inside]
    rows, cols, wts = [], [], []
    na, nb = ii.shape
    queries = 0
    for di, dj in _STEPS:
        for i in range(na):
            for j in range(nb):
                i2, j2 = i + di, j + dj
                if not (0 <= i2 < na and 0 <= j2 < nb):
                    continue
                u, v = index[i, j], index[i2, j2]
                if u < 0 or v < 0:
                    continue
                x, y = nodes[i, j], nodes[i2, j2]
                mid = 0.5 * (x + y)
                if not np.all(domain.contains(mid, tol=-1e-15)):
                    continue
                est = kr_metric(domain, structure, mid, y - x, cfg)
                queries += 1
                if not np.isfinite(est.upper):
                    continue
                rows += [u, v]
                cols += [v, u]
                wts += [est.upper, est.upper]
    nn = len(flat)
    G = coo_matrix((wts, (rows, cols)), shape=(nn, nn)).tocsr()
    src, dst = index[m, w], index[m + n, w]
    dist, pred = dijkstra(G, directed=False, indices=src, return_predecessors=True)
    if not np.isfinite(dist[dst]):
        raise ConnectivityError("the lattice does not connect the endpoints inside the domain")
    if not return_path:
        return float(dist[dst])
    path = [dst]
    while path[-1] != src:
        path.append(pred[path[-1]])
    return LatticePath(float(dist[dst]), flat[path[::-1]], len(rows) // 2, queries)
