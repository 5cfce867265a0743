"""Distance oracle trading space for query time: r-division with global
boundary-to-piece distances, a recursive within-piece oracle, and per-hole
distance tables driving a divide-and-conquer cross-piece query."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .constants import INF
from .decomposition import DecompositionTree, RDivision, build_tree, r_division
from .errors import BadParams, UnknownVertex, VertexInPiece
from .plane_graph import NormalizedGraph, PlaneGraph, normalize
from .shortest_paths import EdgeFilter, LocalGraph, dijkstra, dijkstra_into

__all__ = ["FastPrepOracle", "build", "query", "query_within_piece",
           "part_ii_query", "query_cross_piece", "r_for_space"]


def r_for_space(n: int, space: int) -> int:
    """Division parameter hitting a stored-word target."""
    return min(max(int(np.ceil(n * n / max(space, 1))), 2), n)


@dataclass
class PartI:
    """Global distances between a piece's boundary and all its vertices."""

    boundary: np.ndarray        # sorted
    vtx: np.ndarray             # sorted piece vertices
    bto: np.ndarray             # (k, |V|): d_G(boundary -> vertex)
    bfrom: np.ndarray           # (k, |V|): d_G(vertex -> boundary)

    @property
    def words(self) -> int:
        if len(self.boundary) == 0:
            return 0
        return 2 * self.bto.size + len(self.boundary) + len(self.vtx)


@dataclass
class PartIINode:
    """One recursion node: distances between its split vertices and all of
    its vertices, within the node's subgraph, both directions."""

    sep: np.ndarray             # sorted split vertices (in >= 2 children)
    vtx: np.ndarray             # sorted node vertices
    dto: np.ndarray             # (s, |V|): d_P(sep -> vertex)
    dfrom: np.ndarray           # (s, |V|): d_P(vertex -> sep)

    @property
    def words(self) -> int:
        return 2 * self.dto.size + len(self.sep)


@dataclass
class PartIIIHole:
    """Distances through one hole: from the piece's hole-walk boundary to
    every division boundary vertex inside the hole."""

    x: np.ndarray               # hole-walk boundary order
    cols: np.ndarray            # sorted target vertex ids
    mat: np.ndarray             # (|X|, |cols|)

    def col_of(self, v: int) -> int:
        i = int(np.searchsorted(self.cols, v))
        if i < len(self.cols) and self.cols[i] == v:
            return i
        return -1

    @property
    def words(self) -> int:
        return self.mat.size + len(self.x) + len(self.cols)


@dataclass
class FastPrepOracle:
    ng: NormalizedGraph
    r: int
    tree: DecompositionTree
    div: RDivision
    part_i: dict                # piece id -> PartI
    part_ii: dict               # tree node id -> PartIINode
    part_iii: dict              # (piece id, hole index) -> PartIIIHole
    last_touches: int = 0
    branch_counts: dict = field(default_factory=lambda: {"within": 0,
                                                         "cross": 0})

    @property
    def space_words(self) -> int:
        return (sum(p.words for p in self.part_i.values())
                + sum(p.words for p in self.part_ii.values())
                + sum(p.words for p in self.part_iii.values()))

    def part_i_words(self) -> int:
        return sum(p.words for p in self.part_i.values())

    def part_ii_words(self) -> int:
        return sum(p.words for p in self.part_ii.values())

    def part_iii_words(self) -> int:
        return sum(p.words for p in self.part_iii.values())


def _build_part_i(g: PlaneGraph, div: RDivision) -> dict:
    out = {}
    stop = np.zeros(g.n, dtype=np.uint8)
    for B in div.pieces:
        k = len(B.boundary)
        vtx = B.vertices
        cols = vtx
        # Only distances to the piece's own vertices are stored, so each
        # global search may end as soon as all of them are settled.
        stop[:] = 0
        stop[vtx] = 1
        bto = np.empty((k, len(vtx)), dtype=np.int64)
        bfrom = np.empty((k, len(vtx)), dtype=np.int64)
        for i, b in enumerate(B.boundary):
            bto[i] = dijkstra(g, int(b), stop_mask=stop,
                              stop_count=len(vtx)).dist[cols]
            bfrom[i] = dijkstra(g, int(b), direction="reverse",
                                stop_mask=stop, stop_count=len(vtx)).dist[cols]
        out[B.id] = PartI(boundary=B.boundary, vtx=vtx, bto=bto, bfrom=bfrom)
    return out


def _split_vertices(tree: DecompositionTree, pid: int) -> np.ndarray:
    kids = tree.pieces[pid].children
    if len(kids) < 2:
        return np.empty(0, dtype=np.int64)
    allv = np.concatenate([tree.pieces[c].vertices for c in kids])
    vals, counts = np.unique(allv, return_counts=True)
    return vals[counts >= 2]


def _build_part_ii(tree: DecompositionTree, div: RDivision) -> dict:
    g = tree.g
    out = {}
    for top in div.piece_ids:
        stack = [top]
        while stack:
            pid = stack.pop()
            P = tree.pieces[pid]
            stack.extend(P.children)
            if P.is_leaf:
                continue
            sep = _split_vertices(tree, pid)
            if len(sep) == 0:
                continue
            lg = LocalGraph(g, P.edges, P.vertices)
            dto = np.empty((len(sep), len(P.vertices)), dtype=np.int64)
            dfrom = np.empty_like(dto)
            for i, s in enumerate(sep):
                sl = lg.local(int(s))
                dto[i] = lg.dijkstra(sl, "forward")
                dfrom[i] = lg.dijkstra(sl, "reverse")
            out[pid] = PartIINode(sep=sep, vtx=P.vertices, dto=dto,
                                  dfrom=dfrom)
    return out


def _division_boundary(div: RDivision) -> np.ndarray:
    parts = [B.boundary for B in div.pieces if len(B.boundary)]
    if not parts:
        return np.empty(0, dtype=np.int64)
    return np.unique(np.concatenate(parts))


def _build_part_iii(tree: DecompositionTree, div: RDivision) -> dict:
    g = tree.g
    allb = _division_boundary(div)
    out = {}
    in_piece = np.zeros(g.n_edges, dtype=bool)
    # Searches run on the whole-graph adjacency with the hole's darts
    # unmasked, stopping once every stored column is settled; anything the
    # search leaves tentative is never read.
    mask = np.zeros(g.n_half, dtype=np.uint8)
    stop = np.zeros(g.n, dtype=np.uint8)
    in_hole = np.zeros(g.n, dtype=bool)
    dist = np.empty(g.n, dtype=np.int64)
    parent = np.empty(g.n, dtype=np.int32)
    for B in div.pieces:
        if not B.holes:
            continue
        in_piece[:] = False
        in_piece[B.edges] = True
        region, hole_by_region = div._hole_map(B.id)
        outside = np.flatnonzero(~in_piece)
        hbr = np.full(int(region.max()) + 1, -1, dtype=np.int64)
        for rlab, hidx in hole_by_region.items():
            hbr[rlab] = hidx
        hole_idx = hbr[region[g.face_of[2 * outside]]]
        for hi, hole in enumerate(B.holes):
            hole_edges = outside[hole_idx == hi]
            X = np.asarray(hole.boundary, dtype=np.int64)
            if len(hole_edges) == 0:
                cols = np.unique(X)
                mat = np.full((len(X), len(cols)), INF, dtype=np.int64)
                for i, x in enumerate(X):
                    mat[i, np.searchsorted(cols, x)] = 0
                out[(B.id, hi)] = PartIIIHole(x=X, cols=cols, mat=mat)
                continue
            hs = np.empty(2 * len(hole_edges), dtype=np.int64)
            hs[0::2] = 2 * hole_edges
            hs[1::2] = hs[0::2] + 1
            hs = hs[g.he_len[hs] < INF]
            mask[:] = 0
            mask[hs] = 1
            in_hole[:] = False
            in_hole[g.he_tail[hs]] = True
            in_hole[g.he_head[hs]] = True
            cols = np.unique(np.concatenate([allb[in_hole[allb]], X]))
            stop[:] = 0
            stop[cols] = 1
            filt = EdgeFilter(mask, None)
            mat = np.full((len(X), len(cols)), INF, dtype=np.int64)
            for i, x in enumerate(X):
                xi = np.searchsorted(cols, x)
                if not in_hole[x]:
                    mat[i, xi] = 0
                    continue
                dijkstra_into(g, int(x), filt, "forward", dist, parent,
                              stop, len(cols))
                mat[i] = dist[cols]
                mat[i, xi] = 0
            out[(B.id, hi)] = PartIIIHole(x=X, cols=cols, mat=mat)
    return out


def build(g: PlaneGraph | NormalizedGraph, r: int,
          tree: DecompositionTree | None = None) -> FastPrepOracle:
    ng = g if isinstance(g, NormalizedGraph) else normalize(g)
    n = ng.graph.n
    if not 2 <= r <= n:
        raise BadParams(f"r={r} outside [2, n]")
    if tree is None:
        tree = build_tree(ng)
    div = r_division(tree, r)
    return FastPrepOracle(
        ng=ng, r=r, tree=tree, div=div,
        part_i=_build_part_i(tree.g, div),
        part_ii=_build_part_ii(tree, div),
        part_iii=_build_part_iii(tree, div))


# ---------------------------------------------------------------------------
# Queries (all vertex ids below are normalized-graph ids)

def _vtx_index(arr: np.ndarray, v: int) -> int:
    i = int(np.searchsorted(arr, v))
    if i < len(arr) and arr[i] == v:
        return i
    return -1


def part_ii_query(o: FastPrepOracle, pid: int, u: int, v: int) -> int:
    """Within-piece distance d_B(u, v) from the stored recursion."""
    if u == v:
        return 0
    tree, g = o.tree, o.tree.g
    best = INF
    while True:
        P = tree.pieces[pid]
        if P.is_leaf:
            for e in P.edges:
                for h in (2 * int(e), 2 * int(e) + 1):
                    if g.he_tail[h] == u and g.he_head[h] == v:
                        best = min(best, int(g.he_len[h]))
            o.last_touches += 1
            return best
        node = o.part_ii.get(pid)
        if node is not None:
            iu = _vtx_index(node.vtx, u)
            iv = _vtx_index(node.vtx, v)
            su = _vtx_index(node.sep, u)
            if su >= 0:
                o.last_touches += 1
                return min(best, int(node.dto[su, iv]))
            sv = _vtx_index(node.sep, v)
            if sv >= 0:
                o.last_touches += 1
                return min(best, int(node.dfrom[sv, iu]))
            o.last_touches += len(node.sep)
            au = node.dfrom[:, iu]
            av = node.dto[:, iv]
            ok = (au < INF) & (av < INF)
            if ok.any():
                best = min(best, int((au[ok] + av[ok]).min()))
        nxt = -1
        for c in P.children:
            cv = tree.pieces[c].vertices
            if _vtx_index(cv, u) >= 0 and _vtx_index(cv, v) >= 0:
                nxt = c
                break
        if nxt < 0:
            return best
        pid = nxt


def query_within_piece(o: FastPrepOracle, pid: int, u: int, v: int) -> int:
    """min of the within-piece distance and the best boundary detour."""
    if u == v:
        return 0
    best = part_ii_query(o, pid, u, v)
    pi = o.part_i[pid]
    iu = _vtx_index(pi.vtx, u)
    iv = _vtx_index(pi.vtx, v)
    if len(pi.boundary):
        o.last_touches += 2 * len(pi.boundary)
        au = pi.bfrom[:, iu]
        av = pi.bto[:, iv]
        ok = (au < INF) & (av < INF)
        if ok.any():
            best = min(best, int((au[ok] + av[ok]).min()))
    return best


def _scan(o, row_vals, dgyv, idxs):
    best_v, best_j = INF, -1
    for j in idxs:
        o.last_touches += 1
        d = row_vals[j]
        if d >= INF or dgyv[j] >= INF:
            continue
        val = int(d + dgyv[j])
        if val < best_v or (val == best_v and j < best_j):
            best_v, best_j = val, j
    return best_v, best_j


def _run_orientation(o: FastPrepOracle, rows: np.ndarray, dgyv: np.ndarray):
    """Per-row minima of rows[i, j] + dgyv[j], scanning nested circular
    column intervals anchored by full scans of the first and last row."""
    p, q = rows.shape
    val = np.full(p, INF, dtype=np.int64)
    arg = np.full(p, -1, dtype=np.int64)

    def scan(i, idxs):
        v, j = _scan(o, rows[i], dgyv, idxs)
        if v < val[i]:
            val[i], arg[i] = v, j

    full = range(q)
    scan(0, full)
    if p > 1:
        scan(p - 1, full)
        stack = [(0, p - 1)]
        while stack:
            a, b = stack.pop()
            if b - a <= 1:
                continue
            m = (a + b) // 2
            ya, yb = int(arg[a]), int(arg[b])
            if ya < 0 or yb < 0 or ya == yb:
                # Coinciding anchors: the cyclic interval from ya around to
                # yb is the whole cycle, so a middle minimizer can sit
                # anywhere (tie configurations hit this often).
                scan(m, full)
            else:
                span = (yb - ya) % q
                scan(m, [(ya + t) % q for t in range(span + 1)])
            stack.append((a, m))
            stack.append((m, b))
    return val


def query_cross_piece(o: FastPrepOracle, pid_u: int, pid_v: int,
                      u: int, v: int) -> int:
    """Exact distance when the endpoints sit in different pieces."""
    tree = o.tree
    B, B2 = tree.pieces[pid_u], tree.pieces[pid_v]
    hu = o.div.hole_of(pid_u, v)
    hv = o.div.hole_of(pid_v, u)
    p3 = o.part_iii[(pid_u, hu)]
    X = p3.x
    Y = np.asarray(B2.holes[hv].boundary, dtype=np.int64)
    pi_u, pi_v = o.part_i[pid_u], o.part_i[pid_v]
    iu = _vtx_index(pi_u.vtx, u)
    iv = _vtx_index(pi_v.vtx, v)
    # d_G(u, x) per X row and d_G(y, v) per Y column.
    xrows = np.asarray([_vtx_index(pi_u.boundary, x) for x in X])
    dgux = pi_u.bfrom[xrows, iu]
    yrows = np.asarray([_vtx_index(pi_v.boundary, y) for y in Y])
    dgyv = pi_v.bto[yrows, iv]
    o.last_touches += len(X) + len(Y)
    # Hole-distance submatrix columns for Y (absent column = unreachable).
    ycols = np.asarray([p3.col_of(int(y)) for y in Y])
    rows = np.full((len(X), len(Y)), INF, dtype=np.int64)
    have = ycols >= 0
    rows[:, have] = p3.mat[:, ycols[have]]

    best = INF
    for ordered in (np.arange(len(Y)), np.arange(len(Y))[::-1]):
        val = _run_orientation(o, rows[:, ordered], dgyv[ordered])
        ok = (val < INF) & (dgux < INF)
        if ok.any():
            best = min(best, int((val[ok] + dgux[ok]).min()))
    return best


def query(o: FastPrepOracle, u: int, v: int) -> int:
    fm = o.ng.forward_map
    if not (0 <= u < len(fm) and 0 <= v < len(fm)):
        raise UnknownVertex(f"({u}, {v}) outside the original vertex range")
    if u == v:
        return 0
    o.last_touches = 0
    nu, nv = int(fm[u]), int(fm[v])
    pid_u = int(o.div.canonical_piece[nu])
    if _vtx_index(o.tree.pieces[pid_u].vertices, nv) >= 0:
        o.branch_counts["within"] += 1
        return query_within_piece(o, pid_u, nu, nv)
    pid_v = int(o.div.canonical_piece[nv])
    if _vtx_index(o.tree.pieces[pid_v].vertices, nu) >= 0:
        o.branch_counts["within"] += 1
        return query_within_piece(o, pid_v, nu, nv)
    o.branch_counts["cross"] += 1
    return query_cross_piece(o, pid_u, pid_v, nu, nv)
