"""Dense distance graphs: per-piece boundary distance matrices, piece
selection for queries, and Dijkstra over the implicit union graph."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .constants import INF
from .decomposition import DecompositionTree, Piece
from .errors import InactiveSource, SamePiece
from .plane_graph import PlaneGraph
from .shortest_paths import LocalGraph

__all__ = ["PieceMatrix", "DenseDistanceGraph", "DDGSubgraph", "LevelIndex",
           "piece_boundary_distances", "build_ddg", "select_query_pieces",
           "select_pair_pieces", "ddg_dijkstra"]


@dataclass
class PieceMatrix:
    """Complete within-piece distance matrix over the piece boundary.

    The boundary is ordered by concatenating the hole facial walks, keeping
    the first occurrence of each vertex; walk-consecutive runs of this order
    are what the Monge structure lives on.
    """

    piece_id: int
    boundary: np.ndarray        # ordered boundary vertex ids
    mat: np.ndarray             # int64 (k, k), INF when unreachable in piece

    @property
    def k(self) -> int:
        return len(self.boundary)

    def row_of(self, v: int) -> int:
        hits = np.flatnonzero(self.boundary == v)
        if len(hits) == 0:
            raise KeyError(v)
        return int(hits[0])


@dataclass
class DenseDistanceGraph:
    tree: DecompositionTree
    matrices: dict              # piece id -> PieceMatrix
    entries: int                # total stored matrix cells
    _union: object = field(default=None, repr=False, compare=False)


@dataclass
class DDGSubgraph:
    piece_ids: list
    vertices: np.ndarray        # sorted union of selected boundaries


def _ordered_boundary(g: PlaneGraph, piece: Piece) -> np.ndarray:
    if len(piece.edges) == 1:
        # Base of the recursion: both endpoints count as boundary, even a
        # degree-one endpoint that no other piece shares.
        e = int(piece.edges[0])
        u, w = int(g.he_tail[2 * e]), int(g.he_tail[2 * e + 1])
        return np.asarray([u, w] if u != w else [u], dtype=np.int64)
    out = dict.fromkeys(v for h in piece.holes for v in h.boundary)
    # Every boundary vertex touches a hole; anything left over is appended.
    for v in piece.boundary.tolist():
        out.setdefault(v)
    return np.asarray(list(out), dtype=np.int64)


def piece_boundary_distances(g: PlaneGraph, piece: Piece) -> PieceMatrix:
    """Exact d_B on the ordered boundary, one in-piece Dijkstra per row."""
    bd = _ordered_boundary(g, piece)
    k = len(bd)
    if k == 0:
        return PieceMatrix(piece.id, bd, np.zeros((0, 0), dtype=np.int64))
    if len(piece.edges) == 1:
        e = int(piece.edges[0])
        if k == 1:
            return PieceMatrix(piece.id, bd, np.zeros((1, 1), dtype=np.int64))
        l01, l10 = int(g.he_len[2 * e]), int(g.he_len[2 * e + 1])
        mat = np.asarray([[0, l01], [l10, 0]], dtype=np.int64)
        return PieceMatrix(piece.id, bd, mat)

    lg = LocalGraph(g, piece.edges, piece.vertices)
    rows = np.searchsorted(piece.vertices, bd)
    mat = np.empty((k, k), dtype=np.int64)
    for i, s in enumerate(rows):
        mat[i] = lg.dijkstra(int(s))[rows]
    return PieceMatrix(piece.id, bd, mat)


def build_ddg(tree: DecompositionTree, view=None) -> DenseDistanceGraph:
    """Matrices for every piece in the tree, or only those in a level view."""
    if view is None:
        ids = range(len(tree.pieces))
    else:
        ids = sorted({pid for cut in view for pid in cut})
    matrices = {}
    entries = 0
    for pid in ids:
        pm = piece_boundary_distances(tree.g, tree.pieces[pid])
        matrices[pid] = pm
        entries += pm.k * pm.k
    return DenseDistanceGraph(tree=tree, matrices=matrices, entries=entries)


def _contains(piece: Piece, v: int) -> bool:
    i = np.searchsorted(piece.vertices, v)
    return i < len(piece.vertices) and piece.vertices[i] == v


class LevelIndex:
    """Precomputed query structure for one level view.

    Stores, per cut, the members grouped under their ancestor in the
    previous cut, plus an edge-to-leaf map so the pieces containing a vertex
    can be found by walking up from its incident edges."""

    def __init__(self, tree: DecompositionTree, view):
        self.tree = tree
        self.view = view
        self.leaf_of_edge = np.full(tree.g.n_edges, -1, dtype=np.int64)
        for p in tree.pieces:
            if p.is_leaf:
                self.leaf_of_edge[p.edges] = p.id
        self.cut_children = [None]
        for prev, cut in zip(view, view[1:]):
            prev_set = set(prev)
            groups = {}
            for pid in cut:
                a = pid
                while a not in prev_set:
                    a = tree.pieces[a].parent
                groups.setdefault(a, []).append(pid)
            self.cut_children.append(groups)
        self.cuts_of = {}
        for i, cut in enumerate(view):
            for pid in cut:
                self.cuts_of.setdefault(pid, []).append(i)

    def pieces_with_vertex(self, u: int):
        """All tree pieces containing u: ancestors of its incident leaves."""
        g = self.tree.g
        out = set()
        for h in g.vertex_half_edges(u):
            pid = int(self.leaf_of_edge[h // 2])
            while pid >= 0 and pid not in out:
                out.add(pid)
                parent = self.tree.pieces[pid].parent
                pid = -1 if parent is None else parent
        return out


def select_query_pieces(ddg: DenseDistanceGraph, view, u: int,
                        v: int) -> DDGSubgraph:
    """Stored pieces containing u or v plus their same-cut siblings.

    At every cut, the pieces kept are those whose ancestor in the previous
    cut contains u or v; the previous cut starts at the root, so the first
    cut is kept whole.  ``view`` may be the raw cut list or a LevelIndex.
    """
    idx = view if isinstance(view, LevelIndex) else LevelIndex(ddg.tree, view)
    containing = idx.pieces_with_vertex(u) | idx.pieces_with_vertex(v)
    hit = [set() for _ in idx.view]
    for pid in containing:
        for i in idx.cuts_of.get(pid, ()):
            hit[i].add(pid)
    chosen = set(hit[0])
    for i in range(1, len(idx.view)):
        groups = idx.cut_children[i]
        for anc in hit[i - 1]:
            chosen.update(groups.get(anc, ()))
    ids = sorted(chosen)
    vsets = [ddg.matrices[pid].boundary for pid in ids if ddg.matrices[pid].k]
    verts = (np.unique(np.concatenate(vsets)) if vsets
             else np.empty(0, dtype=np.int64))
    return DDGSubgraph(piece_ids=ids, vertices=verts)


def select_pair_pieces(ddg: DenseDistanceGraph, b_id: int,
                       b2_id: int) -> DDGSubgraph:
    """Pieces covering every path between two division pieces.

    Starting from the root, any member that strictly contains one of the two
    pieces is replaced by its children; the two pieces themselves are then
    dropped, so the result excludes their internal vertices.
    """
    if b_id == b2_id:
        raise SamePiece(f"piece {b_id} paired with itself")
    tree = ddg.tree

    def ancestors(pid):
        out = set()
        p = tree.pieces[pid].parent
        while p is not None:
            out.add(p)
            p = tree.pieces[p].parent
        return out

    anc = ancestors(b_id) | ancestors(b2_id)
    result = []
    stack = [0]
    while stack:
        pid = stack.pop()
        if pid in anc:
            stack.extend(tree.pieces[pid].children)
        elif pid not in (b_id, b2_id):
            result.append(pid)
    ids = sorted(result)
    vsets = [ddg.matrices[pid].boundary for pid in ids
             if pid in ddg.matrices and ddg.matrices[pid].k]
    verts = (np.unique(np.concatenate(vsets)) if vsets
             else np.empty(0, dtype=np.int64))
    return DDGSubgraph(piece_ids=ids, vertices=verts)


class _DDGUnion:
    """All stored matrices flattened into one CSR graph over host vertex ids.

    Matrix cell (i, j) of a piece becomes an edge boundary[i] -> boundary[j];
    edge ids are contiguous per piece, so a query activates its selected
    pieces with a few mask-range fills and runs the compiled Dijkstra with
    everything else masked off.  Infinite cells stay in the arrays — their
    relaxations can never win — which keeps the ranges dense.
    """

    def __init__(self, ddg: "DenseDistanceGraph"):
        n = ddg.tree.g.n
        srcs, tgts, wts = [], [], []
        self.piece_range = {}
        off = 0
        for pid, pm in ddg.matrices.items():
            k = pm.k
            if k == 0:
                self.piece_range[pid] = (off, off)
                continue
            bd = pm.boundary.astype(np.int32)
            srcs.append(np.repeat(bd, k))
            tgts.append(np.tile(bd, k))
            wts.append(pm.mat.ravel())
            self.piece_range[pid] = (off, off + k * k)
            off += k * k
        if off:
            srcs = np.concatenate(srcs)
            order = np.argsort(srcs, kind="stable")
            self.indptr = np.zeros(n + 1, dtype=np.int64)
            np.cumsum(np.bincount(srcs, minlength=n), out=self.indptr[1:])
            self.hs = order.astype(np.int32)
            self.targets = np.concatenate(tgts)[order]
            self.lengths = np.concatenate(wts)[order]
        else:
            self.indptr = np.zeros(n + 1, dtype=np.int64)
            self.hs = np.empty(0, dtype=np.int32)
            self.targets = np.empty(0, dtype=np.int32)
            self.lengths = np.empty(0, dtype=np.int64)
        self.mask = np.zeros(off, dtype=np.uint8)
        self.dist = np.empty(n, dtype=np.int64)
        self.parent = np.empty(n, dtype=np.int32)


def ddg_dijkstra(ddg: DenseDistanceGraph, sub: DDGSubgraph,
                 source: int) -> np.ndarray:
    """Exact distances from source in the union of the selected piece
    matrices, aligned with ``sub.vertices``.  Infinite matrix entries are
    present but never relaxed."""
    from . import _kernel

    verts = sub.vertices
    s = np.searchsorted(verts, source)
    if s >= len(verts) or verts[s] != source:
        raise InactiveSource(f"source {source} not in the selected boundaries")
    u = ddg._union
    if u is None:
        u = ddg._union = _DDGUnion(ddg)
    u.mask[:] = 0
    for pid in sub.piece_ids:
        a, b = u.piece_range[pid]
        u.mask[a:b] = 1
    init = verts.astype(np.int32)
    _kernel.dijkstra_arrays(ddg.tree.g.n, u.indptr, u.hs, u.targets,
                            u.lengths, int(source), u.mask, init,
                            u.dist, u.parent)
    return u.dist[verts].copy()
