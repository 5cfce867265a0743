"""Exact shortest-path primitives: Dijkstra, brute-force all-pairs oracle,
tight-dart extraction and left-first search."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernel
from .constants import INF
from .errors import InactiveSource, TooLarge, Unreachable
from .plane_graph import PlaneGraph

__all__ = ["DistanceArray", "EdgeFilter", "dijkstra", "apsp_oracle",
           "tight_darts", "left_first_search", "LocalGraph"]


@dataclass
class EdgeFilter:
    """Active dart subset, as a mask over half-edge ids.

    ``vertices`` optionally restricts (and speeds up) the search to a known
    superset of reachable vertices; the mask must not leave it.
    """

    half_edge_mask: np.ndarray | None = None
    vertices: np.ndarray | None = None

    @staticmethod
    def from_half_edges(g: PlaneGraph, hs, vertices=None) -> "EdgeFilter":
        mask = np.zeros(g.n_half, dtype=np.uint8)
        mask[np.asarray(hs, dtype=np.int64)] = 1
        return EdgeFilter(mask, None if vertices is None else
                          np.asarray(vertices, dtype=np.int32))


@dataclass
class DistanceArray:
    source: int
    direction: str
    dist: np.ndarray      # int64, INF when unreached
    parent_he: np.ndarray  # int32, -1 at source/unreached


def _max_finite_len(g: PlaneGraph) -> int:
    """Largest finite half-edge length, cached; lets the kernel pick its
    bucket-queue fast path and skip virtual (infinite) darts."""
    m = g._csr.get("max_len")
    if m is None:
        fin = g.he_len[g.he_len < INF]
        m = int(fin.max()) if len(fin) else 0
        g._csr["max_len"] = m
    return m


def _scratch(g: PlaneGraph):
    s = g._csr.get("scratch")
    if s is None:
        s = (np.empty(g.n, dtype=np.int64), np.empty(g.n, dtype=np.int32))
        g._csr["scratch"] = s
    return s


def dijkstra_into(g: PlaneGraph, source: int, filt: EdgeFilter | None,
                  direction: str, dist: np.ndarray, parent_he: np.ndarray,
                  stop_mask: np.ndarray | None = None, stop_count: int = 0):
    """In-place Dijkstra; ``dist``/``parent_he`` are caller workspaces.

    A ``stop_mask``/``stop_count`` pair ends the search once that many
    marked vertices are settled; only their distances are guaranteed final.
    """
    indptr, hs, targets, lengths = g.csr(direction)
    active = filt.half_edge_mask if filt else None
    init = filt.vertices if filt else None
    if init is not None:
        # Membership is part of the caller's contract; check the source only.
        if not np.any(init == source):
            raise InactiveSource(f"source {source} outside the filter vertices")
    _kernel.dijkstra_arrays(g.n, indptr, hs, targets, lengths, int(source),
                            active, init, dist, parent_he,
                            stop_mask, stop_count, _max_finite_len(g))


def dijkstra(g: PlaneGraph, source: int, filt: EdgeFilter | None = None,
             direction: str = "forward",
             stop_mask: np.ndarray | None = None,
             stop_count: int = 0) -> DistanceArray:
    """Exact distances from (or to, when ``direction='reverse'``) ``source``
    within the filtered subgraph."""
    if not (0 <= source < g.n):
        raise InactiveSource(f"source {source} out of range")
    dist = np.full(g.n, INF, dtype=np.int64)
    parent = np.full(g.n, -1, dtype=np.int32)
    dijkstra_into(g, source, filt, direction, dist, parent,
                  stop_mask, stop_count)
    return DistanceArray(source=source, direction=direction,
                         dist=dist, parent_he=parent)


def apsp_oracle(g: PlaneGraph, cap: int = 5000) -> np.ndarray:
    """Ground-truth n x n distance matrix via n Dijkstra runs."""
    if g.n > cap:
        raise TooLarge(f"apsp oracle capped at {cap} vertices, got {g.n}")
    out = np.empty((g.n, g.n), dtype=np.int64)
    parent = np.empty(g.n, dtype=np.int32)
    indptr, hs, targets, lengths = g.csr("forward")
    for s in range(g.n):
        _kernel.dijkstra_arrays(g.n, indptr, hs, targets, lengths, s,
                                None, None, out[s], parent, None, 0,
                                _max_finite_len(g))
    return out


class LocalGraph:
    """CSR over an edge subset with vertices renumbered to 0..k-1.

    Runs many Dijkstras confined to a small piece without touching
    whole-graph arrays; vertex ids translate through ``vs`` (sorted).
    """

    def __init__(self, g: PlaneGraph, edges: np.ndarray,
                 vertices: np.ndarray | None = None):
        hs = np.empty(2 * len(edges), dtype=np.int64)
        hs[0::2] = 2 * np.asarray(edges, dtype=np.int64)
        hs[1::2] = hs[0::2] + 1
        hs = hs[g.he_len[hs] < INF]
        if vertices is None:
            ends = np.concatenate([g.he_tail[hs], g.he_head[hs]])
            vertices = np.unique(ends)
        self.vs = np.asarray(vertices, dtype=np.int64)
        self.n = len(self.vs)
        tails = np.searchsorted(self.vs, g.he_tail[hs])
        order = np.argsort(tails, kind="stable")
        self.indptr = np.zeros(self.n + 1, dtype=np.int64)
        np.cumsum(np.bincount(tails, minlength=self.n), out=self.indptr[1:])
        self.hs = hs[order].astype(np.int32)
        self.targets = np.searchsorted(self.vs, g.he_head[hs])[order] \
            .astype(np.int32)
        self.lengths = g.he_len[hs][order]
        self.max_len = int(self.lengths.max()) if len(self.lengths) else 0
        self._rtargets = None
        self._dist = np.empty(self.n, dtype=np.int64)
        self._parent = np.empty(self.n, dtype=np.int32)

    def local(self, v: int) -> int:
        i = int(np.searchsorted(self.vs, v))
        if i >= self.n or self.vs[i] != v:
            return -1
        return i

    def dijkstra(self, source_local: int, direction: str = "forward",
                 out: np.ndarray | None = None,
                 stop_mask: np.ndarray | None = None,
                 stop_count: int = 0) -> np.ndarray:
        """Distances from a local source id; returns an internal scratch
        array unless ``out`` is given.  With a ``stop_mask``/``stop_count``
        pair only the marked vertices are guaranteed final."""
        if direction == "forward":
            indptr, hs, targets, lengths = (self.indptr, self.hs,
                                            self.targets, self.lengths)
        else:
            if self._rtargets is None:
                tails = self.targets
                order = np.argsort(tails, kind="stable")
                self._rindptr = np.zeros(self.n + 1, dtype=np.int64)
                np.cumsum(np.bincount(tails, minlength=self.n),
                          out=self._rindptr[1:])
                tails_local = np.repeat(np.arange(self.n, dtype=np.int32),
                                        np.diff(self.indptr))
                self._rtargets = tails_local[order]
                self._rlengths = self.lengths[order]
                self._rhs = self.hs[order]
            indptr, hs, targets, lengths = (self._rindptr, self._rhs,
                                            self._rtargets, self._rlengths)
        dist = self._dist if out is None else out
        _kernel.dijkstra_arrays(self.n, indptr, hs, targets, lengths,
                                int(source_local), None, None,
                                dist, self._parent, stop_mask, stop_count,
                                self.max_len)
        return dist


def tight_darts(g: PlaneGraph, da: DistanceArray,
                filt: EdgeFilter | None = None) -> np.ndarray:
    """Half-edges (w, z) with finite dist[w] and len == dist[z] - dist[w].

    For a reverse DistanceArray the roles of tail and head swap, so that the
    returned darts lie on shortest paths *to* the source.
    """
    if da.direction == "forward":
        tail, head = g.he_tail, g.he_head
    else:
        tail, head = g.he_head, g.he_tail
    d = da.dist
    ok = (g.he_len < INF) & (d[tail] < INF) & (d[head] < INF)
    ok &= d[tail] + np.where(ok, g.he_len, 0) == d[head]
    if filt is not None and filt.half_edge_mask is not None:
        ok &= filt.half_edge_mask.astype(bool)
    return np.flatnonzero(ok).astype(np.int32)


def left_first_search(g: PlaneGraph, start: int, goal, active: np.ndarray,
                      entry_he: int, exits: dict | None = None) -> list[int]:
    """Leftmost path in the active subgraph, as a list of half-edges.

    Depth-first search where the children of a vertex are explored in
    clockwise rotation order starting immediately after the dart by which
    the vertex was entered; ``entry_he`` (an out-half-edge of ``start``)
    fixes that position at the start vertex.

    Terminates on the first dart arriving at ``goal``; alternatively,
    ``exits`` maps a vertex to an out-half-edge position whose occurrence in
    the scan ends the search at that vertex (used for virtual exit darts).
    """
    act = active.astype(bool) if active.dtype != np.bool_ else active

    def candidates(pos_he: int):
        # Full clockwise cycle starting just after the position; the position
        # itself comes last so an exit anchored there is still seen.
        h = int(g.rot_next[pos_he])
        while h != pos_he:
            yield h
            h = int(g.rot_next[h])
        yield pos_he

    visited = {start}
    path: list[int] = []
    frames = [candidates(entry_he)]
    anchors = [start]
    while frames:
        v = anchors[-1]
        advanced = False
        for h in frames[-1]:
            if exits is not None and exits.get(v) == h:
                return path
            if not act[h]:
                continue
            w = int(g.he_head[h])
            if goal is not None and w == goal:
                path.append(h)
                return path
            if w in visited:
                continue
            visited.add(w)
            path.append(h)
            frames.append(candidates(h ^ 1))
            anchors.append(w)
            advanced = True
            break
        if not advanced:
            frames.pop()
            anchors.pop()
            if path:
                path.pop()
    raise Unreachable(f"no active path from {start} to {goal}")
