"""Linear-space distance oracle: p-way level view of the decomposition tree,
dense distance graph on the stored cuts, Dijkstra over selected pieces."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constants import INF
from .ddg import (
    DenseDistanceGraph,
    LevelIndex,
    build_ddg,
    ddg_dijkstra,
    select_query_pieces,
)
from .decomposition import DecompositionTree, build_tree, level_view
from .errors import BadParams, UnknownVertex
from .plane_graph import NormalizedGraph, PlaneGraph, normalize

__all__ = ["LinearOracle", "build", "query", "default_p"]


def default_p(n: int, delta: float = 0.25) -> int:
    return max(2, int(np.ceil(n ** delta)))


@dataclass
class LinearOracle:
    ng: NormalizedGraph
    p: int
    tree: DecompositionTree
    view: list
    ddg: DenseDistanceGraph
    index: LevelIndex
    last_touched: int = 0       # boundary vertices relaxed by the last query

    @property
    def space_words(self) -> int:
        """Stored 64-bit words: matrix cells plus boundary orderings."""
        return sum(pm.k * pm.k + pm.k for pm in self.ddg.matrices.values())


def build(g: PlaneGraph | NormalizedGraph, p: int,
          tree: DecompositionTree | None = None) -> LinearOracle:
    ng = g if isinstance(g, NormalizedGraph) else normalize(g)
    if not 2 <= p <= max(2, ng.graph.n):
        raise BadParams(f"p={p} outside [2, n]")
    if tree is None:
        tree = build_tree(ng)
    view = level_view(tree, p)
    ddg = build_ddg(tree, view)
    return LinearOracle(ng=ng, p=p, tree=tree, view=view, ddg=ddg,
                        index=LevelIndex(tree, view))


def query(o: LinearOracle, u: int, v: int) -> int:
    """Exact distance between two original-graph vertices."""
    fm = o.ng.forward_map
    if not (0 <= u < len(fm) and 0 <= v < len(fm)):
        raise UnknownVertex(f"({u}, {v}) outside the original vertex range")
    if u == v:
        o.last_touched = 0
        return 0
    nu, nv = int(fm[u]), int(fm[v])
    sub = select_query_pieces(o.ddg, o.index, nu, nv)
    o.last_touched = len(sub.vertices)
    dist = ddg_dijkstra(o.ddg, sub, nu)
    iv = int(np.searchsorted(sub.vertices, nv))
    if iv >= len(sub.vertices) or sub.vertices[iv] != nv:
        return INF
    return int(dist[iv])
