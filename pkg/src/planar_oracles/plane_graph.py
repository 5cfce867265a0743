"""Embedded directed planar graphs.

The internal representation is a half-edge (rotation system) structure over
the *undirected* support of the graph: every undirected edge owns two
half-edges ``2e`` (tail -> head) and ``2e + 1`` (head -> tail), each carrying
the length of its direction or ``INF`` when the direction is absent.  User
visible "darts" are the finite directions, numbered by their position in the
input dart list.

Rotations are stored as a cyclic clockwise order of incident edges at every
vertex.  Facial walks follow the convention ``next(h) = rot_next[twin(h)]``;
with it, a facial traversal visits every half-edge exactly once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .constants import INF, MAX_LENGTH
from .errors import (
    DanglingDart,
    Disconnected,
    DuplicateEdge,
    FormatError,
    NegativeLength,
    NonPlanarRotation,
)

__all__ = ["PlaneGraph", "NormalizedGraph", "build_from_rotation",
           "build_from_coordinates", "normalize", "save_graph", "load_graph"]


@dataclass
class PlaneGraph:
    """Immutable embedded planar graph (mutation after construction is a bug)."""

    n: int
    # Per half-edge arrays; twin(h) == h ^ 1.
    he_tail: np.ndarray
    he_head: np.ndarray
    he_len: np.ndarray
    rot_next: np.ndarray
    rot_prev: np.ndarray
    first_he: np.ndarray
    face_of: np.ndarray
    n_faces: int
    # User dart table (finite directions only, input order).
    dart_tail: np.ndarray
    dart_head: np.ndarray
    dart_len: np.ndarray
    dart_he: np.ndarray
    he_dart: np.ndarray
    coords: np.ndarray | None = None
    _csr: dict = field(default_factory=dict, repr=False)

    @property
    def n_half(self) -> int:
        return self.he_tail.shape[0]

    @property
    def n_edges(self) -> int:
        return self.n_half // 2

    @property
    def n_darts(self) -> int:
        return self.dart_tail.shape[0]

    def degree(self, v: int) -> int:
        h0 = self.first_he[v]
        if h0 < 0:
            return 0
        d, h = 1, self.rot_next[h0]
        while h != h0:
            d += 1
            h = self.rot_next[h]
        return d

    def vertex_half_edges(self, v: int) -> list[int]:
        """Outgoing half-edges of ``v`` in clockwise rotation order."""
        h0 = self.first_he[v]
        if h0 < 0:
            return []
        out, h = [int(h0)], int(self.rot_next[h0])
        while h != h0:
            out.append(h)
            h = int(self.rot_next[h])
        return out

    def face_walk(self, f: int) -> np.ndarray:
        """Half-edges of face ``f`` in traversal order."""
        start = int(np.flatnonzero(self.face_of == f)[0])
        walk, h = [start], int(self.rot_next[start ^ 1])
        while h != start:
            walk.append(h)
            h = int(self.rot_next[h ^ 1])
        return np.asarray(walk, dtype=np.int32)

    def csr(self, direction: str = "forward"):
        """(indptr, half_edge_ids, targets, lengths) over finite half-edges."""
        if direction not in self._csr:
            finite = np.flatnonzero(self.he_len < INF).astype(np.int32)
            key = self.he_tail if direction == "forward" else self.he_head
            tgt = self.he_head if direction == "forward" else self.he_tail
            order = np.argsort(key[finite], kind="stable")
            hs = finite[order]
            indptr = np.zeros(self.n + 1, dtype=np.int64)
            np.add.at(indptr, key[finite] + 1, 1)
            np.cumsum(indptr, out=indptr)
            self._csr[direction] = (
                indptr,
                hs,
                tgt[hs].astype(np.int32),
                self.he_len[hs].copy(),
            )
        return self._csr[direction]

    def connected(self) -> bool:
        if self.n == 0:
            return True
        seen = np.zeros(self.n, dtype=bool)
        stack = [0]
        seen[0] = True
        while stack:
            v = stack.pop()
            for h in self.vertex_half_edges(v):
                w = int(self.he_head[h])
                if not seen[w]:
                    seen[w] = True
                    stack.append(w)
        return bool(seen.all())


@dataclass
class NormalizedGraph:
    """Degree-reduced graph with maps back to the original vertices."""

    graph: PlaneGraph
    forward_map: np.ndarray   # original vertex -> representative copy
    reverse_map: np.ndarray   # new vertex -> original vertex (-1 = auxiliary)


def _build(n, edges, rot_edges, dart_list, coords=None) -> PlaneGraph:
    """Assemble the half-edge structure.

    ``edges``: list of (u, v, len_uv, len_vu) with INF for absent directions.
    ``rot_edges``: per vertex, incident edge ids in clockwise order.
    ``dart_list``: (tail, head, length) triples defining user dart numbering.
    """
    m = len(edges)
    he_tail = np.empty(2 * m, dtype=np.int32)
    he_len = np.empty(2 * m, dtype=np.int64)
    for e, (u, v, luv, lvu) in enumerate(edges):
        he_tail[2 * e] = u
        he_tail[2 * e + 1] = v
        he_len[2 * e] = luv
        he_len[2 * e + 1] = lvu
    he_head = he_tail[np.arange(2 * m, dtype=np.int32) ^ 1]

    rot_next = np.full(2 * m, -1, dtype=np.int32)
    rot_prev = np.full(2 * m, -1, dtype=np.int32)
    first_he = np.full(n, -1, dtype=np.int32)
    for v in range(n):
        hs = []
        for e in rot_edges[v]:
            u0, v0 = int(he_tail[2 * e]), int(he_tail[2 * e + 1])
            if u0 == v:
                hs.append(2 * e)
            elif v0 == v:
                hs.append(2 * e + 1)
            else:
                raise DanglingDart(f"edge {e} in rotation of non-endpoint {v}")
        if not hs:
            continue
        first_he[v] = hs[0]
        for i, h in enumerate(hs):
            nx = hs[(i + 1) % len(hs)]
            rot_next[h] = nx
            rot_prev[nx] = h

    if np.any(rot_next[: 2 * m] < 0):
        missing = int(np.flatnonzero(rot_next < 0)[0])
        raise DanglingDart(
            f"half-edge {missing} absent from the rotation of vertex "
            f"{int(he_tail[missing])}"
        )

    # Facial walks: next(h) = rot_next[twin(h)].
    face_of = np.full(2 * m, -1, dtype=np.int32)
    n_faces = 0
    for h0 in range(2 * m):
        if face_of[h0] >= 0:
            continue
        h = h0
        while face_of[h] < 0:
            face_of[h] = n_faces
            h = int(rot_next[h ^ 1])
        if h != h0:
            raise NonPlanarRotation("facial walk does not close")
        n_faces += 1

    _check_euler(n, m, he_tail, he_head, face_of, rot_next, first_he)

    dart_tail = np.asarray([d[0] for d in dart_list], dtype=np.int32)
    dart_head = np.asarray([d[1] for d in dart_list], dtype=np.int32)
    dart_len = np.asarray([d[2] for d in dart_list], dtype=np.int64)
    # Match darts to half-edges.
    he_of = {}
    for e, (u, v, luv, lvu) in enumerate(edges):
        if luv < INF:
            he_of[(u, v)] = 2 * e
        if lvu < INF:
            he_of[(v, u)] = 2 * e + 1
    dart_he = np.asarray(
        [he_of[(int(t), int(h))] for t, h in zip(dart_tail, dart_head)],
        dtype=np.int32,
    )
    he_dart = np.full(2 * m, -1, dtype=np.int32)
    he_dart[dart_he] = np.arange(len(dart_list), dtype=np.int32)

    return PlaneGraph(
        n=n, he_tail=he_tail, he_head=he_head, he_len=he_len,
        rot_next=rot_next, rot_prev=rot_prev, first_he=first_he,
        face_of=face_of, n_faces=n_faces,
        dart_tail=dart_tail, dart_head=dart_head, dart_len=dart_len,
        dart_he=dart_he, he_dart=he_dart, coords=coords,
    )


def _check_euler(n, m, he_tail, he_head, face_of, rot_next, first_he):
    """Per-component Euler identity n - m + f = 2; isolated vertices skipped."""
    comp = np.full(n, -1, dtype=np.int32)
    n_comp = 0
    for s in range(n):
        if comp[s] >= 0 or first_he[s] < 0:
            continue
        stack = [s]
        comp[s] = n_comp
        while stack:
            v = stack.pop()
            h0 = first_he[v]
            h = h0
            while True:
                w = int(he_head[h])
                if comp[w] < 0:
                    comp[w] = n_comp
                    stack.append(w)
                h = int(rot_next[h])
                if h == h0:
                    break
        n_comp += 1
    if n_comp == 0:
        return
    nv = np.bincount(comp[comp >= 0], minlength=n_comp)
    me = np.zeros(n_comp, dtype=np.int64)
    np.add.at(me, comp[he_tail[::2]], 1)
    # A face belongs to the component of any of its half-edges.
    face_comp = np.full(face_of.max() + 1, -1, dtype=np.int32)
    face_comp[face_of] = comp[he_tail]
    nf = np.bincount(face_comp, minlength=n_comp)
    bad = np.flatnonzero(nv - me + nf != 2)
    if bad.size:
        c = int(bad[0])
        raise NonPlanarRotation(
            f"Euler check failed on component {c}: "
            f"n={int(nv[c])} m={int(me[c])} f={int(nf[c])}"
        )


def _pair_darts(n, dart_list):
    """Group reciprocal darts into undirected edges."""
    seen = {}
    edges = []
    for i, (u, v, ln) in enumerate(dart_list):
        u, v, ln = int(u), int(v), int(ln)
        if not (0 <= u < n and 0 <= v < n) or u == v:
            raise DanglingDart(f"dart {i}: bad endpoints ({u}, {v})")
        if ln < 0 or ln > MAX_LENGTH:
            raise NegativeLength(f"dart {i}: length {ln} out of range")
        if (u, v) in seen:
            raise DuplicateEdge(f"dart {i}: duplicate dart ({u}, {v})")
        seen[(u, v)] = i
    edge_of_dart = {}
    for (u, v), i in seen.items():
        if (u, v) in edge_of_dart:
            continue
        j = seen.get((v, u))
        e = len(edges)
        luv = int(dart_list[i][2])
        lvu = int(dart_list[j][2]) if j is not None else INF
        edges.append((u, v, luv, lvu))
        edge_of_dart[(u, v)] = e
        edge_of_dart[(v, u)] = e
    return edges, edge_of_dart


def build_from_rotation(n, dart_list, rotations) -> PlaneGraph:
    """Build from explicit clockwise rotations.

    ``rotations[v]`` lists dart ids, one per undirected edge incident to
    ``v``, in clockwise order; either direction of an edge identifies it.
    """
    edges, edge_of_dart = _pair_darts(n, dart_list)
    if len(rotations) != n:
        raise FormatError("rotation table size mismatch")
    degree = [0] * n
    for (u, w, _, _) in edges:
        degree[u] += 1
        degree[w] += 1
    rot_edges = []
    for v in range(n):
        es, used = [], set()
        for d in rotations[v]:
            if not (0 <= d < len(dart_list)):
                raise DanglingDart(f"rotation of {v}: bad dart id {d}")
            u0, v0, _ = dart_list[d]
            if v not in (int(u0), int(v0)):
                raise DanglingDart(f"rotation of {v}: dart {d} not incident")
            e = edge_of_dart[(int(u0), int(v0))]
            if e in used:
                raise DanglingDart(f"rotation of {v}: edge of dart {d} repeated")
            used.add(e)
            es.append(e)
        if len(es) != degree[v]:
            raise DanglingDart(
                f"rotation of {v}: {len(es)} entries, degree {degree[v]}"
            )
        rot_edges.append(es)
    return _build(n, edges, rot_edges, dart_list)


def build_from_coordinates(vertices, edges) -> PlaneGraph:
    """Build from a straight-line drawing.

    ``edges`` holds (u, v, length_uv, length_vu); a length of ``None`` marks
    an absent direction.  The drawing must be crossing free (not verified).
    """
    pts = np.asarray(vertices, dtype=np.float64)
    n = pts.shape[0]
    if len(np.unique(pts, axis=0)) != n:
        raise DuplicateEdge("duplicate vertex coordinates")
    dart_list = []
    edef = []
    seen = set()
    for (u, v, luv, lvu) in edges:
        u, v = int(u), int(v)
        if (u, v) in seen or (v, u) in seen:
            raise DuplicateEdge(f"edge ({u}, {v}) listed twice")
        seen.add((u, v))
        luv = INF if luv is None else int(luv)
        lvu = INF if lvu is None else int(lvu)
        if luv >= INF and lvu >= INF:
            raise NegativeLength(f"edge ({u}, {v}) has no finite direction")
        for ln in (luv, lvu):
            if ln < INF and not (0 <= ln <= MAX_LENGTH):
                raise NegativeLength(f"edge ({u}, {v}): length {ln} out of range")
        if luv < INF:
            dart_list.append((u, v, luv))
        if lvu < INF:
            dart_list.append((v, u, lvu))
        edef.append((u, v, luv, lvu))
    rot_edges = [[] for _ in range(n)]
    ang = [[] for _ in range(n)]
    for e, (u, v, _, _) in enumerate(edef):
        for a, b in ((u, v), (v, u)):
            dx, dy = pts[b] - pts[a]
            rot_edges[a].append(e)
            ang[a].append(math.atan2(dy, dx))
    for v in range(n):
        order = sorted(range(len(rot_edges[v])), key=lambda i: -ang[v][i])
        rot_edges[v] = [rot_edges[v][i] for i in order]
    return _build(n, edef, rot_edges, dart_list, coords=pts)


def normalize(g: PlaneGraph) -> NormalizedGraph:
    """Distance-preserving degree reduction to maximum degree 3.

    A vertex of degree d >= 4 becomes a cycle of d copies joined by
    zero-length edges in both directions; copy i inherits the i-th incident
    edge of the clockwise rotation.  Pieces are triangulated transiently
    inside the separator code, so no triangulation edges are added here.
    """
    if not g.connected():
        raise Disconnected("normalize requires a connected graph")

    copies = []        # per original vertex: list of new ids
    nxt = 0
    degs = [len(g.vertex_half_edges(v)) for v in range(g.n)]
    for v in range(g.n):
        k = degs[v] if degs[v] >= 4 else 1
        copies.append(list(range(nxt, nxt + k)))
        nxt += k
    n_new = nxt

    # Map each half-edge to the copy that carries it.
    carrier = np.empty(g.n_half, dtype=np.int32)
    for v in range(g.n):
        hs = g.vertex_half_edges(v)
        if len(hs) >= 4:
            for i, h in enumerate(hs):
                carrier[h] = copies[v][i]
        else:
            for h in hs:
                carrier[h] = copies[v][0]

    edges = []
    new_edge_of_old = {}
    for e in range(g.n_edges):
        u2 = int(carrier[2 * e])
        v2 = int(carrier[2 * e + 1])
        new_edge_of_old[e] = len(edges)
        edges.append((u2, v2, int(g.he_len[2 * e]), int(g.he_len[2 * e + 1])))
    cycle_edge = {}
    for v in range(g.n):
        k = len(copies[v])
        if k == 1:
            continue
        for i in range(k):
            a, b = copies[v][i], copies[v][(i + 1) % k]
            cycle_edge[(v, i)] = len(edges)
            edges.append((a, b, 0, 0))

    rot_edges = [[] for _ in range(n_new)]
    for v in range(g.n):
        hs = g.vertex_half_edges(v)
        k = len(copies[v])
        if k == 1:
            rot_edges[copies[v][0]] = [new_edge_of_old[h // 2] for h in hs]
        else:
            for i, h in enumerate(hs):
                c = copies[v][i]
                e_prev = cycle_edge[(v, (i - 1) % k)]
                e_next = cycle_edge[(v, i)]
                rot_edges[c] = [new_edge_of_old[h // 2], e_next, e_prev]

    dart_list = []
    for (u2, v2, luv, lvu) in edges:
        if luv < INF:
            dart_list.append((u2, v2, luv))
        if lvu < INF:
            dart_list.append((v2, u2, lvu))
    ng = _build(n_new, edges, rot_edges, dart_list)

    forward = np.asarray([c[0] for c in copies], dtype=np.int32)
    reverse = np.full(n_new, -1, dtype=np.int32)
    for v, cs in enumerate(copies):
        for c in cs:
            reverse[c] = v
    return NormalizedGraph(graph=ng, forward_map=forward, reverse_map=reverse)


# ---------------------------------------------------------------------------
# Versioned text format:
#   pg 1 <n> <m>
#   m lines: u v len
#   'rot' + n lines: deg dart_id...      (clockwise)
#   or 'xy' + n lines: x y               (rotation by angular sort)

def save_graph(g: PlaneGraph, path) -> None:
    lines = [f"pg 1 {g.n} {g.n_darts}"]
    for i in range(g.n_darts):
        lines.append(f"{int(g.dart_tail[i])} {int(g.dart_head[i])} {int(g.dart_len[i])}")
    lines.append("rot")
    for v in range(g.n):
        ds = []
        for h in g.vertex_half_edges(v):
            d = int(g.he_dart[h])
            if d < 0:
                d = int(g.he_dart[h ^ 1])
            if d < 0:
                raise FormatError("structural edge without a dart cannot be saved")
            ds.append(d)
        lines.append(" ".join(map(str, [len(ds)] + ds)))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def load_graph(path) -> PlaneGraph:
    with open(path) as fh:
        toks = fh.read().split("\n")
    toks = [t for t in toks if t.strip()]
    head = toks[0].split()
    if len(head) != 4 or head[0] != "pg" or head[1] != "1":
        raise FormatError(f"bad header: {toks[0]!r}")
    n, m = int(head[2]), int(head[3])
    if len(toks) < 1 + m + 1:
        raise FormatError("truncated file")
    darts = []
    for i in range(m):
        u, v, ln = toks[1 + i].split()
        darts.append((int(u), int(v), int(ln)))
    mode = toks[1 + m].strip()
    body = toks[2 + m: 2 + m + n]
    if len(body) != n:
        raise FormatError("truncated vertex section")
    if mode == "rot":
        rotations = []
        for line in body:
            vals = list(map(int, line.split()))
            if len(vals) != vals[0] + 1:
                raise FormatError(f"bad rotation line: {line!r}")
            rotations.append(vals[1:])
        return build_from_rotation(n, darts, rotations)
    if mode == "xy":
        pts = [tuple(map(float, line.split())) for line in body]
        merged = {}
        for (u, v, ln) in darts:
            if (v, u) in merged:
                uu, vv, luv, _ = merged[(v, u)]
                merged[(v, u)] = (uu, vv, luv, ln)
            else:
                merged[(u, v)] = (u, v, ln, None)
        return build_from_coordinates(pts, list(merged.values()))
    raise FormatError(f"unknown section {mode!r}")
