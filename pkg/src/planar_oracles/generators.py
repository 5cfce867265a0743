"""Seeded planar graph generators used by the CLI and the test suite.

All generators are deterministic for a fixed (kind, n, seed, weight_range)
and produce connected, embedded graphs via straight-line drawings.
"""

from __future__ import annotations

import numpy as np

from .errors import BadParams
from .plane_graph import PlaneGraph, build_from_coordinates

__all__ = ["grid_graph", "delaunay_graph", "random_graph", "generate"]


def _weights(rng, k, weight_range):
    lo, hi = weight_range
    if not (0 <= lo <= hi):
        raise BadParams(f"bad weight range {weight_range}")
    return rng.integers(lo, hi + 1, size=k)


def _grid_dims(n: int) -> tuple[int, int]:
    # Most square factor pair; prime n degrades to a path.
    a = int(np.sqrt(n))
    while n % a:
        a -= 1
    return a, n // a


def _grid_edges(rows: int, cols: int):
    for i in range(rows):
        for j in range(cols):
            v = i * cols + j
            if j + 1 < cols:
                yield (v, v + 1)
            if i + 1 < rows:
                yield (v, v + cols)


def grid_graph(n: int, seed: int, weight_range=(1, 10)) -> PlaneGraph:
    """Four-neighbor grid with independent per-direction weights."""
    if n < 2:
        raise BadParams("grid needs n >= 2")
    rows, cols = _grid_dims(n)
    rng = np.random.default_rng(seed)
    pairs = list(_grid_edges(rows, cols))
    w = _weights(rng, 2 * len(pairs), weight_range)
    edges = [(u, v, int(w[2 * i]), int(w[2 * i + 1]))
             for i, (u, v) in enumerate(pairs)]
    pts = [(j, -i) for i in range(rows) for j in range(cols)]
    return build_from_coordinates(pts, edges)


def delaunay_graph(n: int, seed: int, weight_range=(1, 10)) -> PlaneGraph:
    """Delaunay triangulation of n random points, randomly weighted."""
    if n < 3:
        raise BadParams("delaunay needs n >= 3")
    from scipy.spatial import Delaunay

    rng = np.random.default_rng(seed)
    pts = rng.random((n, 2))
    tri = Delaunay(pts)
    pairs = set()
    for s in tri.simplices:
        for a, b in ((s[0], s[1]), (s[1], s[2]), (s[2], s[0])):
            pairs.add((min(a, b), max(a, b)))
    pairs = sorted(pairs)
    w = _weights(rng, 2 * len(pairs), weight_range)
    edges = [(int(u), int(v), int(w[2 * i]), int(w[2 * i + 1]))
             for i, (u, v) in enumerate(pairs)]
    return build_from_coordinates(pts, edges)


def random_graph(n: int, seed: int, weight_range=(1, 10)) -> PlaneGraph:
    """Grid with random edge deletions, kept connected by a spanning tree."""
    if n < 2:
        raise BadParams("random needs n >= 2")
    rows, cols = _grid_dims(n)
    rng = np.random.default_rng(seed)
    pairs = list(_grid_edges(rows, cols))
    order = rng.permutation(len(pairs))
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    keep = np.zeros(len(pairs), dtype=bool)
    for i in order:
        u, v = pairs[i]
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
            keep[i] = True
    # Keep each non-tree edge with probability 1/2.
    extra = rng.random(len(pairs)) < 0.5
    keep |= extra
    kept = [pairs[i] for i in range(len(pairs)) if keep[i]]
    w = _weights(rng, 2 * len(kept), weight_range)
    edges = [(u, v, int(w[2 * i]), int(w[2 * i + 1]))
             for i, (u, v) in enumerate(kept)]
    pts = [(j, -i) for i in range(rows) for j in range(cols)]
    return build_from_coordinates(pts, edges)


def generate(kind: str, n: int, seed: int, weight_range=(1, 10)) -> PlaneGraph:
    if kind == "grid":
        return grid_graph(n, seed, weight_range)
    if kind == "delaunay":
        return delaunay_graph(n, seed, weight_range)
    if kind == "random":
        return random_graph(n, seed, weight_range)
    raise BadParams(f"unknown graph kind {kind!r}")
