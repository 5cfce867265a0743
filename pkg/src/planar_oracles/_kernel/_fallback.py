"""Pure-Python Dijkstra kernel (used when the compiled core is unavailable)."""

import heapq

from ..constants import INF

IMPLEMENTATION = "python"


def dijkstra_arrays(n, indptr, hs, targets, lengths, source, active,
                    init_vertices, dist, parent_he, stop=None, stop_count=0,
                    max_len=-1):
    """Single-source Dijkstra over a CSR adjacency.

    ``dist``/``parent_he`` are preallocated workspaces; entries listed in
    ``init_vertices`` (all vertices when None) are reset here.  When an
    ``active`` mask is given, only half-edges with a nonzero entry relax, and
    the search must stay within the init set (caller's contract).  When a
    ``stop`` vertex mask is given with a positive ``stop_count``, the search
    ends once that many stop vertices are settled; their distances are
    exact, everything else may be left tentative.
    """
    if init_vertices is None:
        dist[:] = INF
        parent_he[:] = -1
    else:
        dist[init_vertices] = INF
        parent_he[init_vertices] = -1
    dist[source] = 0
    heap = [(0, source)]
    while heap:
        d, v = heapq.heappop(heap)
        if d != dist[v]:
            continue
        if stop_count > 0 and stop is not None and stop[v]:
            stop_count -= 1
            if stop_count == 0:
                break
        for i in range(indptr[v], indptr[v + 1]):
            if active is not None and not active[hs[i]]:
                continue
            if 0 <= max_len < lengths[i]:
                # Callers passing a length bound use it to exclude virtual
                # (unusable) darts; mirror the compiled kernel.
                continue
            w = targets[i]
            nd = d + lengths[i]
            if nd < dist[w]:
                dist[w] = nd
                parent_he[w] = hs[i]
                heapq.heappush(heap, (nd, w))


def greedy_graded(D, lo, hi, q, rows, split, bf, binv):
    """Monotone two-part split with per-part row liveness (see the compiled
    core for the full contract); returns (ok, blocking pos, failing pos)."""
    import numpy as np

    p = len(rows)
    s = 0
    lf = li = -1
    for t in range(p):
        i = rows[t]
        s_i = s
        dead_f = hi[i] < s_i
        if lf >= 0 and not dead_f:
            da, db = D[rows[lf]], D[i]
            seg = np.flatnonzero(da[s_i:] > db[s_i:])
            if seg.size:
                cand = s_i + int(seg[-1]) + 1
                if cand > hi[i]:
                    s_i, dead_f = hi[i] + 1, True
                else:
                    s_i = cand
        if li >= 0 and lo[i] <= s_i - 1:
            cap = int(split[li]) - 1
            if cap > 0 and np.any(D[rows[li]][:cap] > D[i][:cap]):
                return (0, li, t)
        split[t] = s_i
        if dead_f:
            bf[t] = q
        else:
            bf[t] = s_i
            lf = t
        if lo[i] <= s_i - 1:
            binv[t] = s_i - 1
            li = t
        else:
            binv[t] = -1
        s = s_i
    return (1, -1, -1)
