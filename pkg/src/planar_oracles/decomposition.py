"""Recursive decomposition of an embedded planar graph.

A piece is a set of undirected edges of the host graph together with the
induced embedding.  Splitting uses a fundamental-cycle separator: the piece's
faces are fan-triangulated transiently (at the combinatorial-map level, so
repeated walk corners and the resulting loops or parallel edges are fine),
a BFS spanning tree is grown on the real piece edges, and the interdigitating
dual tree over the triangles is searched for the edge whose fundamental cycle
best balances the chosen weight (vertex count, or hole count when a piece has
accumulated too many holes).

The derived views are the r-division (highest tree pieces of size <= r) and
the p-way level view (tree frontiers every ceil(log2 p) depths).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import Disconnected, TooSmall, VertexInPiece
from .plane_graph import NormalizedGraph, PlaneGraph

__all__ = ["Hole", "Piece", "DecompositionTree", "RDivision",
           "cycle_separator", "build_tree", "r_division", "level_view"]

MAX_HOLES = 4
# Below this many vertices the 2/3 balance guarantee degenerates; splits
# still happen, they just are not asserted balanced.
BALANCE_FLOOR = 9


@dataclass
class Hole:
    """A face of a piece that is not a face of the host graph."""

    walk: np.ndarray            # half-edge ids in facial walk order
    boundary: list[int]         # boundary vertices, first occurrence in walk order

    def __repr__(self):
        return f"Hole(walk={len(self.walk)}, boundary={len(self.boundary)})"


@dataclass
class Piece:
    id: int
    edges: np.ndarray           # undirected edge ids, sorted
    vertices: np.ndarray        # sorted
    boundary: np.ndarray        # sorted subset of vertices
    holes: list[Hole]
    parent: int | None
    children: list[int] = field(default_factory=list)
    depth: int = 0

    @property
    def is_leaf(self) -> bool:
        return not self.children

    def half_edge_mask(self, g: PlaneGraph) -> np.ndarray:
        mask = np.zeros(g.n_half, dtype=np.uint8)
        mask[2 * self.edges] = 1
        mask[2 * self.edges + 1] = 1
        return mask


@dataclass
class DecompositionTree:
    g: PlaneGraph
    pieces: list[Piece]
    leaf_edge_count: int
    c_b_observed: float         # max |boundary| / sqrt(|vertices|) over pieces

    @property
    def root(self) -> Piece:
        return self.pieces[0]

    def depth(self) -> int:
        return max(p.depth for p in self.pieces)


@dataclass
class RDivision:
    tree: DecompositionTree
    r: int
    piece_ids: list[int]
    canonical_piece: np.ndarray     # vertex -> lowest containing piece id
    piece_of_edge: np.ndarray       # edge -> owning division piece id
    _hole_maps: dict = field(default_factory=dict, repr=False)

    @property
    def pieces(self) -> list[Piece]:
        return [self.tree.pieces[i] for i in self.piece_ids]

    def pieces_of_vertex(self, v: int) -> list[int]:
        g = self.tree.g
        out = set()
        for h in g.vertex_half_edges(v):
            out.add(int(self.piece_of_edge[h // 2]))
        return sorted(out)

    def hole_of(self, piece_id: int, v: int) -> int:
        """Index of the hole of the given piece whose region contains v."""
        B = self.tree.pieces[piece_id]
        idx = np.searchsorted(B.vertices, v)
        if idx < len(B.vertices) and B.vertices[idx] == v:
            bi = np.searchsorted(B.boundary, v)
            if bi < len(B.boundary) and B.boundary[bi] == v:
                # Deterministic choice for shared boundary vertices.
                for i, h in enumerate(B.holes):
                    if v in h.boundary:
                        return i
            raise VertexInPiece(f"vertex {v} is internal to piece {piece_id}")
        g = self.tree.g
        region, hole_by_region = self._hole_map(piece_id)
        h0 = g.first_he[v]
        return hole_by_region[int(region[g.face_of[h0]])]

    def _hole_map(self, piece_id: int):
        cached = self._hole_maps.get(piece_id)
        if cached is not None:
            return cached
        from scipy.sparse import coo_matrix
        from scipy.sparse.csgraph import connected_components

        g = self.tree.g
        B = self.tree.pieces[piece_id]
        in_b = np.zeros(g.n_edges, dtype=bool)
        in_b[B.edges] = True
        # Union host faces across every edge outside B: components are the
        # regions carved out by B, one per hole.
        out_e = np.flatnonzero(~in_b)
        adj = coo_matrix(
            (np.ones(len(out_e), dtype=np.int8),
             (g.face_of[2 * out_e], g.face_of[2 * out_e + 1])),
            shape=(g.n_faces, g.n_faces))
        _, region = connected_components(adj, directed=False)
        region = region.astype(np.int32)
        hole_by_region = {}
        for i, h in enumerate(B.holes):
            r = int(region[g.face_of[h.walk[0]]])
            hole_by_region.setdefault(r, i)
        self._hole_maps[piece_id] = (region, hole_by_region)
        return region, hole_by_region


# ---------------------------------------------------------------------------
# Piece face enumeration

def _piece_faces(g: PlaneGraph, edges: np.ndarray):
    """Facial walks of the sub-map induced by an edge set.

    Returns (walks, is_hole) where each walk is a list of half-edge ids and
    is_hole marks walks that are not faces of the host graph.
    """
    hs = np.empty(2 * len(edges), dtype=np.int64)
    hs[0::2] = 2 * edges
    hs[1::2] = 2 * edges + 1
    in_b = set(hs.tolist())
    # Restricted rotation: next piece half-edge clockwise after h at tail(h).
    nxt_rot = {}
    for h in in_b:
        if h in nxt_rot:
            continue
        k = int(g.rot_next[h])
        while k not in in_b:
            k = int(g.rot_next[k])
        nxt_rot[h] = k
    walks, is_hole = [], []
    seen = set()
    for h0 in hs.tolist():
        if h0 in seen:
            continue
        walk, h, hole = [], h0, False
        while h not in seen:
            seen.add(h)
            walk.append(h)
            nh = nxt_rot[h ^ 1]
            if nh != int(g.rot_next[h ^ 1]):
                hole = True
            h = nh
        walks.append(walk)
        is_hole.append(hole)
    return walks, is_hole


def _full_degree(g: PlaneGraph) -> np.ndarray:
    d = g._csr.get("full_degree")
    if d is None:
        d = np.bincount(g.he_tail, minlength=g.n)
        g._csr["full_degree"] = d
    return d


def _make_piece(g: PlaneGraph, pid: int, edges: np.ndarray, parent, depth) -> Piece:
    edges = np.sort(np.asarray(edges, dtype=np.int64))
    tails = np.concatenate([g.he_tail[2 * edges], g.he_tail[2 * edges + 1]])
    vs = np.unique(tails)
    # Boundary: vertex with at least one incident host edge outside the piece.
    deg_in = np.bincount(tails, minlength=g.n)
    boundary = vs[deg_in[vs] < _full_degree(g)[vs]]
    walks, hole_flags = _piece_faces(g, edges)
    holes = []
    bset = set(boundary.tolist())
    for walk, flag in zip(walks, hole_flags):
        if not flag:
            continue
        hb, seen = [], set()
        for h in walk:
            t = int(g.he_tail[h])
            if t in bset and t not in seen:
                seen.add(t)
                hb.append(t)
        holes.append(Hole(walk=np.asarray(walk, dtype=np.int32), boundary=hb))
    return Piece(id=pid, edges=edges, vertices=vs, boundary=boundary,
                 holes=holes, parent=parent, depth=depth)


# ---------------------------------------------------------------------------
# Fundamental-cycle separator

def _bfs_tree(g: PlaneGraph, edges, vertices):
    """BFS spanning forest over the piece edges.

    Returns (parent_he: vertex -> half-edge into the vertex or -1,
    depth, tree_edge flags, component id per vertex)."""
    adj = {}
    for e in edges:
        for h in (2 * int(e), 2 * int(e) + 1):
            adj.setdefault(int(g.he_tail[h]), []).append(h)
    parent_he = {v: -1 for v in vertices}
    depth = {}
    comp = {}
    tree_edge = set()
    nc = 0
    for s in vertices:
        s = int(s)
        if s in depth:
            continue
        depth[s] = 0
        comp[s] = nc
        queue = [s]
        qi = 0
        while qi < len(queue):
            v = queue[qi]
            qi += 1
            for h in adj.get(v, ()):
                w = int(g.he_head[h])
                if w not in depth:
                    depth[w] = depth[v] + 1
                    comp[w] = nc
                    parent_he[w] = h
                    tree_edge.add(h // 2)
                    queue.append(w)
        nc += 1
    return parent_he, depth, tree_edge, comp, nc


def _cycle_vertices(g: PlaneGraph, parent_he, depth, a, b):
    """Vertices on the tree paths from a and b to their lowest common ancestor."""
    pa, pb = [a], [b]
    da, db = depth[a], depth[b]
    while da > db:
        a = int(g.he_tail[parent_he[a]])
        pa.append(a)
        da -= 1
    while db > da:
        b = int(g.he_tail[parent_he[b]])
        pb.append(b)
        db -= 1
    while a != b:
        a = int(g.he_tail[parent_he[a]])
        b = int(g.he_tail[parent_he[b]])
        pa.append(a)
        pb.append(b)
    return set(pa) | set(pb)


@dataclass
class _SepState:
    """Everything needed to apply any candidate cut of one piece."""

    edges: np.ndarray
    node_of: dict
    dual_edges: list
    parent_he: dict
    depth: dict
    order: list
    par_edge: np.ndarray
    par_node: np.ndarray
    candidates: list        # cut-child dual nodes, best balance first


def _separator_state(g: PlaneGraph, piece: Piece,
                     weighting: str = "vertices") -> _SepState:
    edges = piece.edges
    if len(edges) <= 1:
        raise TooSmall(f"piece {piece.id} has {len(edges)} edge(s)")
    if weighting not in ("vertices", "holes"):
        raise ValueError(weighting)

    walks, hole_flags = _piece_faces(g, edges)

    # Dual nodes: one per fan triangle of each face walk (whole face when the
    # walk has fewer than three sides).  node_of[h] is the dual node whose
    # triangle has the half-edge h on its boundary; that triangle also has
    # tail(h) as a corner.
    node_of = {}
    n_nodes = 0
    diagonals = []      # (node_a, node_b, corner_u, corner_v, in_hole)
    hole_node = []      # one dual node inside each hole, walk order
    for walk, flag in zip(walks, hole_flags):
        k = len(walk)
        base = n_nodes
        if k < 3:
            for h in walk:
                node_of[h] = base
            n_nodes += 1
        else:
            n_nodes += k - 2
            node_of[walk[0]] = base
            for i in range(1, k - 1):
                node_of[walk[i]] = base + min(i - 1, k - 3)
            node_of[walk[k - 1]] = base + k - 3
            c0 = int(g.he_tail[walk[0]])
            for j in range(1, k - 2):
                cj = int(g.he_tail[walk[j + 1]])
                diagonals.append((base + j - 1, base + j, c0, cj, flag))
        if flag:
            hole_node.append(base)

    parent_he, depth, tree_edges, comp, nc = _bfs_tree(g, edges, piece.vertices)
    if nc != 1:
        raise Disconnected(f"piece {piece.id} is disconnected")

    # Dual tree: diagonals plus real non-tree edges (interdigitation).
    # In hole-balancing mode, cycles through a hole's own fan are not
    # eligible: a cycle that splits a hole would break the <= 4 hole bound.
    dual_adj = [[] for _ in range(n_nodes)]
    dual_edges = []     # (na, nb, corner_u, corner_v, eligible)
    for (na, nb, cu, cv, in_hole) in diagonals:
        dual_edges.append((na, nb, cu, cv,
                           not (in_hole and weighting == "holes")))
    for e in edges:
        e = int(e)
        if e in tree_edges:
            continue
        na, nb = node_of[2 * e], node_of[2 * e + 1]
        dual_edges.append((na, nb, int(g.he_tail[2 * e]),
                           int(g.he_tail[2 * e + 1]), True))
    for i, (na, nb, _, _, _) in enumerate(dual_edges):
        dual_adj[na].append((nb, i))
        dual_adj[nb].append((na, i))

    # Node weights.  Vertex weights go to a non-hole occurrence when one
    # exists, so balancing tracks the piece itself rather than the hole fans.
    weight = np.zeros(n_nodes, dtype=np.int64)
    if weighting == "vertices":
        placed = set()
        for hole_pass in (False, True):
            for walk, flag in zip(walks, hole_flags):
                if flag != hole_pass:
                    continue
                for h in walk:
                    t = int(g.he_tail[h])
                    if t not in placed:
                        placed.add(t)
                        weight[node_of[h]] += 1
    else:
        for nd in hole_node:
            weight[nd] += 1
    he_cnt = np.zeros(n_nodes, dtype=np.int64)
    for h, nd in node_of.items():
        he_cnt[nd] += 1
    total_he = int(he_cnt.sum())
    total = int(weight.sum())
    if total == 0:
        raise TooSmall(f"piece {piece.id}: nothing to balance ({weighting})")

    # Root the dual tree, accumulate subtree weights, pick the edge whose
    # removal best balances them.
    order = []
    par_edge = np.full(n_nodes, -1, dtype=np.int64)
    par_node = np.full(n_nodes, -1, dtype=np.int64)
    seen = np.zeros(n_nodes, dtype=bool)
    stack = [0]
    seen[0] = True
    while stack:
        v = stack.pop()
        order.append(v)
        for (w, ei) in dual_adj[v]:
            if not seen[w]:
                seen[w] = True
                par_edge[w] = ei
                par_node[w] = v
                stack.append(w)
    sub = weight.astype(np.int64).copy()
    sub_he = he_cnt.copy()
    for v in reversed(order):
        p = par_node[v]
        if p >= 0:
            sub[p] += sub[v]
            sub_he[p] += sub_he[v]
    ranked = []
    for v in order:
        if par_edge[v] < 0 or not dual_edges[int(par_edge[v])][4]:
            continue
        # A cut must leave real half-edges on both sides to make progress.
        if sub_he[v] == 0 or sub_he[v] == total_he:
            continue
        s = int(sub[v])
        if weighting == "holes" and (s == 0 or s == total):
            continue
        ranked.append((max(s, total - s), v))
    if not ranked:
        raise TooSmall(f"piece {piece.id}: no eligible separator")
    ranked.sort()
    return _SepState(edges=edges, node_of=node_of, dual_edges=dual_edges,
                     parent_he=parent_he, depth=depth, order=order,
                     par_edge=par_edge, par_node=par_node,
                     candidates=[v for _, v in ranked])


def _apply_cut(g: PlaneGraph, st: _SepState, cut_child: int):
    """Sides of the fundamental cycle of one candidate dual tree edge."""
    _, _, cu, cv, _ = st.dual_edges[int(st.par_edge[cut_child])]
    separator = _cycle_vertices(g, st.parent_he, st.depth, cu, cv)

    # Side of each dual node: descendants of cut_child vs the rest.  Parents
    # precede children in the DFS order, so one forward pass marks the subtree.
    n_nodes = len(st.par_node)
    side = np.zeros(n_nodes, dtype=np.uint8)
    side[cut_child] = 1
    for v in st.order:
        p = st.par_node[v]
        if p >= 0 and side[p] and v != cut_child:
            side[v] = 1

    side_a, side_b = [], []
    for e in st.edges:
        e = int(e)
        sa, sb = side[st.node_of[2 * e]], side[st.node_of[2 * e + 1]]
        if sa == 1 and sb == 1:
            side_a.append(e)
        elif sa == 0 and sb == 0:
            side_b.append(e)
        else:
            # Edge crossed by the cut lies on the cycle.
            u, w = int(g.he_tail[2 * e]), int(g.he_tail[2 * e + 1])
            assert u in separator and w in separator
            side_a.append(e)
    return separator, np.asarray(side_a, dtype=np.int64), \
        np.asarray(side_b, dtype=np.int64)


def cycle_separator(g: PlaneGraph, piece: Piece, weighting: str = "vertices"):
    """Split a connected piece along a fundamental cycle.

    Returns (separator vertex set, edge ids side A, edge ids side B); the
    cycle's own edges are assigned to side A (their endpoints are separator
    vertices, so either side is valid).
    """
    st = _separator_state(g, piece, weighting)
    return _apply_cut(g, st, st.candidates[0])


# ---------------------------------------------------------------------------
# Tree construction

def _edge_components(g: PlaneGraph, edges) -> list[np.ndarray]:
    """Connected components of an edge set, as edge id arrays."""
    parent = {}

    def find(a):
        root = a
        while parent[root] != root:
            root = parent[root]
        while parent[a] != root:
            parent[a], a = root, parent[a]
        return root

    for e in edges:
        u, v = int(g.he_tail[2 * int(e)]), int(g.he_tail[2 * int(e) + 1])
        parent.setdefault(u, u)
        parent.setdefault(v, v)
        parent[find(u)] = find(v)
    by_comp = {}
    for e in edges:
        c = find(int(g.he_tail[2 * int(e)]))
        by_comp.setdefault(c, []).append(int(e))
    groups = sorted(by_comp.values(), key=len, reverse=True)
    return [np.asarray(grp, dtype=np.int64) for grp in groups]


def _halving_split(piece: Piece):
    """Last-resort arbitrary balanced split (keeps the recursion terminating)."""
    mid = len(piece.edges) // 2
    return piece.edges[:mid], piece.edges[mid:]


MAX_SPLIT_TRIES = 24
BALANCE_TARGET = 0.8        # accept a cut outright below this edge fraction


def _hole_count(g: PlaneGraph, part) -> int:
    _, flags = _piece_faces(g, part)
    return sum(flags)


def _level_cuts(g: PlaneGraph, B: Piece):
    """Candidate splits along BFS level sets.

    The fallback for stringy, tree-like pieces where every fundamental
    cycle degenerates into a long tree path."""
    parent_he, depth, tree_edges, comp, nc = _bfs_tree(g, B.edges, B.vertices)
    if nc != 1:
        raise Disconnected(f"piece {B.id} is disconnected")
    max_d = max(depth.values())
    if max_d < 2:
        return
    w_at = np.zeros(max_d + 1, dtype=np.int64)
    for v, d in depth.items():
        w_at[d] += 1
    below = np.cumsum(w_at)
    total = int(below[-1])
    # Levels ranked by how evenly they split the vertices off-level.
    cost = np.maximum(below - w_at, total - below)
    for ell in np.argsort(cost[1:max_d], kind="stable") + 1:
        ell = int(ell)
        side_a, side_b = [], []
        for e in B.edges:
            e = int(e)
            da = depth[int(g.he_tail[2 * e])]
            db = depth[int(g.he_tail[2 * e + 1])]
            (side_a if max(da, db) <= ell else side_b).append(e)
        if side_a and side_b:
            yield (np.asarray(side_a, dtype=np.int64),
                   np.asarray(side_b, dtype=np.int64))


def _score_parts(g: PlaneGraph, B: Piece, ea, eb):
    parts = [p for side in (ea, eb) for p in _edge_components(g, side)]
    worst_holes = max(_hole_count(g, p) for p in parts)
    frac = max(len(ea), len(eb)) / len(B.edges)
    return (worst_holes > MAX_HOLES, frac), parts


def _split_piece(g: PlaneGraph, B: Piece) -> list[np.ndarray]:
    """Connected child edge sets for one piece.

    Fundamental-cycle cuts are tried in balance order and the first one
    within the hole budget and balance target wins.  When none qualifies
    (tree-like pieces in particular), BFS level cuts compete too, and the
    best-scoring split overall is taken.
    """
    weighting = "holes" if len(B.holes) >= 3 else "vertices"
    best = None
    try:
        st = _separator_state(g, B, weighting)
        for cut in st.candidates[:MAX_SPLIT_TRIES]:
            _, ea, eb = _apply_cut(g, st, cut)
            if len(ea) == 0 or len(eb) == 0:
                continue
            score, parts = _score_parts(g, B, ea, eb)
            if not score[0] and score[1] <= BALANCE_TARGET:
                return parts
            if best is None or score < best[0]:
                best = (score, parts)
    except TooSmall:
        if len(B.edges) <= 1:
            raise
    for i, (ea, eb) in enumerate(_level_cuts(g, B)):
        score, parts = _score_parts(g, B, ea, eb)
        if not score[0] and score[1] <= BALANCE_TARGET:
            return parts
        if best is None or score < best[0]:
            best = (score, parts)
        if i + 1 >= MAX_SPLIT_TRIES:
            break
    if best is None:
        raise TooSmall(f"piece {B.id}: all candidate cuts degenerate")
    return best[1]


def build_tree(ng: NormalizedGraph | PlaneGraph,
               leaf_edge_count: int = 1) -> DecompositionTree:
    """Full binary decomposition down to pieces of <= leaf_edge_count edges.

    Pieces with three or more holes are split balancing hole count, which
    keeps every piece at <= 4 holes; all other splits balance vertex count.
    """
    g = ng.graph if isinstance(ng, NormalizedGraph) else ng
    pieces = [_make_piece(g, 0, np.arange(g.n_edges), None, 0)]
    stack = [0]
    while stack:
        pid = stack.pop()
        B = pieces[pid]
        if len(B.edges) <= leaf_edge_count:
            continue
        try:
            # Children stay connected: a separator side that falls apart
            # contributes one child per component (the only place the tree
            # is not strictly binary).
            parts = _split_piece(g, B)
        except Disconnected:
            parts = _edge_components(g, B.edges)
        except TooSmall:
            parts = list(_halving_split(B))
        if len(parts) < 2:
            parts = list(_halving_split(B))
        for part in parts:
            cid = len(pieces)
            pieces.append(_make_piece(g, cid, part, pid, B.depth + 1))
            B.children.append(cid)
            stack.append(cid)
    cb = max((len(p.boundary) / np.sqrt(len(p.vertices)) for p in pieces),
             default=0.0)
    return DecompositionTree(g=g, pieces=pieces,
                             leaf_edge_count=leaf_edge_count,
                             c_b_observed=float(cb))


# ---------------------------------------------------------------------------
# Derived views

def r_division(tree: DecompositionTree, r: int) -> RDivision:
    """Highest tree pieces with at most r vertices."""
    g = tree.g
    ids = []
    stack = [0]
    while stack:
        pid = stack.pop()
        B = tree.pieces[pid]
        # Fallback splits can leave transient pieces with too many holes;
        # descending past them restores the hole budget (leaves have one).
        if B.is_leaf or (len(B.vertices) <= r and len(B.holes) <= MAX_HOLES):
            ids.append(pid)
        else:
            stack.extend(B.children)
    ids.sort()
    canonical = np.full(g.n, -1, dtype=np.int64)
    piece_of_edge = np.full(g.n_edges, -1, dtype=np.int64)
    for pid in sorted(ids, reverse=True):
        B = tree.pieces[pid]
        canonical[B.vertices] = pid
        piece_of_edge[B.edges] = pid
    return RDivision(tree=tree, r=r, piece_ids=ids,
                     canonical_piece=canonical, piece_of_edge=piece_of_edge)


def level_view(tree: DecompositionTree, p: int) -> list[list[int]]:
    """Tree frontiers every ceil(log2 p) depths, ending at the leaves.

    Each cut is a maximal antichain: nodes at the cut depth plus any leaves
    above it.  Consecutive cuts nest.
    """
    if p < 2:
        raise ValueError("p must be at least 2")
    stride = max(1, int(np.ceil(np.log2(p))))
    max_depth = tree.depth()
    cuts = []
    d = 0
    while True:
        cut = []
        stack = [0]
        while stack:
            pid = stack.pop()
            B = tree.pieces[pid]
            if B.depth == d or (B.is_leaf and B.depth < d):
                cut.append(pid)
            elif B.depth < d:
                stack.extend(B.children)
        cuts.append(sorted(cut))
        if d >= max_depth:
            break
        d += stride
        if d > max_depth:
            d = max_depth
    return cuts
