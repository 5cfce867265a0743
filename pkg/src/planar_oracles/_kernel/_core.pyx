# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled Dijkstra kernel."""

from libc.stdlib cimport free, malloc, realloc

import numpy as np

cimport numpy as cnp

IMPLEMENTATION = "cython"

cdef long long INF = <long long>1 << 62


cdef struct Heap:
    long long *key
    int *val
    Py_ssize_t size
    Py_ssize_t cap


cdef void *realloc_or_die(void *p, size_t nbytes) except NULL:
    cdef void *q = realloc(p, nbytes)
    if q == NULL:
        raise MemoryError()
    return q


cdef inline int heap_push(Heap *h, long long key, int val) except -1:
    cdef Py_ssize_t i, p
    if h.size == h.cap:
        h.cap *= 2
        h.key = <long long *>realloc_or_die(h.key, h.cap * sizeof(long long))
        h.val = <int *>realloc_or_die(h.val, h.cap * sizeof(int))
    i = h.size
    h.size += 1
    while i > 0:
        p = (i - 1) >> 1
        if h.key[p] <= key:
            break
        h.key[i] = h.key[p]
        h.val[i] = h.val[p]
        i = p
    h.key[i] = key
    h.val[i] = val
    return 0


cdef inline void heap_pop(Heap *h, long long *key, int *val):
    cdef Py_ssize_t i = 0, c
    key[0] = h.key[0]
    val[0] = h.val[0]
    h.size -= 1
    cdef long long k = h.key[h.size]
    cdef int v = h.val[h.size]
    while True:
        c = 2 * i + 1
        if c >= h.size:
            break
        if c + 1 < h.size and h.key[c + 1] < h.key[c]:
            c += 1
        if h.key[c] >= k:
            break
        h.key[i] = h.key[c]
        h.val[i] = h.val[c]
        i = c
    h.key[i] = k
    h.val[i] = v


def dijkstra_arrays(int n,
                    cnp.int64_t[::1] indptr,
                    cnp.int32_t[::1] hs,
                    cnp.int32_t[::1] targets,
                    cnp.int64_t[::1] lengths,
                    int source,
                    object active_obj,
                    object init_obj,
                    cnp.int64_t[::1] dist,
                    cnp.int32_t[::1] parent_he,
                    object stop_obj=None,
                    Py_ssize_t stop_count=0,
                    long long max_len=-1):
    """Single-source Dijkstra over a CSR adjacency.

    When ``max_len`` is non-negative and small, every relaxed length is
    assumed bounded by it and a circular bucket queue replaces the binary
    heap; longer (virtual) lengths are skipped as if masked off."""
    cdef cnp.uint8_t[::1] active
    cdef cnp.uint8_t[::1] stop
    cdef cnp.int32_t[::1] init
    cdef bint has_active = active_obj is not None
    cdef bint has_stop = stop_obj is not None and stop_count > 0
    cdef Py_ssize_t i, j
    cdef int v, w
    cdef long long d, nd

    if has_stop:
        stop = stop_obj

    if has_active:
        active = active_obj
    if init_obj is None:
        for i in range(n):
            dist[i] = INF
            parent_he[i] = -1
    else:
        init = init_obj
        for i in range(init.shape[0]):
            dist[init[i]] = INF
            parent_he[init[i]] = -1
    dist[source] = 0

    cdef Py_ssize_t c1, b, e, used, cap, live
    cdef long long *ekey
    cdef int *eval_
    cdef Py_ssize_t *enxt
    cdef Py_ssize_t *head
    if 0 <= max_len <= 65536:
        # Dial's bucket queue: tentative keys always lie within max_len of
        # the settling front, so max_len + 1 circular buckets suffice.
        c1 = max_len + 1
        cap = 1024
        used = 0
        live = 0
        ekey = <long long *>malloc(cap * sizeof(long long))
        eval_ = <int *>malloc(cap * sizeof(int))
        enxt = <Py_ssize_t *>malloc(cap * sizeof(Py_ssize_t))
        head = <Py_ssize_t *>malloc(c1 * sizeof(Py_ssize_t))
        if ekey == NULL or eval_ == NULL or enxt == NULL or head == NULL:
            free(ekey); free(eval_); free(enxt); free(head)
            raise MemoryError()
        try:
            for b in range(c1):
                head[b] = -1
            ekey[0] = 0
            eval_[0] = source
            enxt[0] = -1
            head[0] = 0
            used = 1
            live = 1
            d = 0
            while live > 0:
                b = d % c1
                if head[b] < 0:
                    d += 1
                    continue
                e = head[b]
                head[b] = enxt[e]
                live -= 1
                v = eval_[e]
                if ekey[e] != dist[v]:
                    continue
                if has_stop and stop[v]:
                    stop_count -= 1
                    if stop_count == 0:
                        break
                for j in range(indptr[v], indptr[v + 1]):
                    if has_active and active[hs[j]] == 0:
                        continue
                    if lengths[j] > max_len:
                        continue
                    w = targets[j]
                    nd = d + lengths[j]
                    if nd < dist[w]:
                        dist[w] = nd
                        parent_he[w] = hs[j]
                        if used == cap:
                            cap *= 2
                            ekey = <long long *>realloc_or_die(
                                ekey, cap * sizeof(long long))
                            eval_ = <int *>realloc_or_die(
                                eval_, cap * sizeof(int))
                            enxt = <Py_ssize_t *>realloc_or_die(
                                enxt, cap * sizeof(Py_ssize_t))
                        ekey[used] = nd
                        eval_[used] = w
                        i = nd % c1
                        enxt[used] = head[i]
                        head[i] = used
                        used += 1
                        live += 1
        finally:
            free(ekey)
            free(eval_)
            free(enxt)
            free(head)
        return

    cdef Heap h
    h.cap = 1024
    h.size = 0
    h.key = <long long *>malloc(h.cap * sizeof(long long))
    h.val = <int *>malloc(h.cap * sizeof(int))
    if h.key == NULL or h.val == NULL:
        raise MemoryError()
    try:
        heap_push(&h, 0, source)
        while h.size > 0:
            heap_pop(&h, &d, &v)
            if d != dist[v]:
                continue
            if has_stop and stop[v]:
                # Settled distances are final; once the last stop vertex is
                # settled the caller has everything it asked for.
                stop_count -= 1
                if stop_count == 0:
                    break
            for j in range(indptr[v], indptr[v + 1]):
                if has_active and active[hs[j]] == 0:
                    continue
                w = targets[j]
                nd = d + lengths[j]
                if nd < dist[w]:
                    dist[w] = nd
                    parent_he[w] = hs[j]
                    heap_push(&h, nd, w)
    finally:
        free(h.key)
        free(h.val)


def greedy_graded(cnp.int64_t[:, ::1] D,
                  cnp.int64_t[::1] lo,
                  cnp.int64_t[::1] hi,
                  Py_ssize_t q,
                  cnp.int64_t[::1] rows,
                  cnp.int64_t[::1] split,
                  cnp.int64_t[::1] bf,
                  cnp.int64_t[::1] binv):
    """Monotone two-part split with per-part row liveness.

    ``D`` is the adjacent-column difference of a graded matrix; a pair of
    rows (a, b), a before b, violates graded Monge at columns (j, j+1)
    exactly when D[a, j] > D[b, j].  Scanning the row subsequence ``rows``
    in order, each row's split starts at the previous one and is pushed
    right past any violation against the last falling-live row; pushing it
    past the row's final finite column (``hi``) makes the row falling-dead.
    A violation against the last inverse-live row inside its settled region
    is unfixable and aborts.  ``split``/``bf``/``binv`` are outputs sized
    like ``rows``; returns (ok, blocking position, failing position)."""
    cdef Py_ssize_t p = rows.shape[0]
    cdef Py_ssize_t t, j, ri, rlf, rli
    cdef Py_ssize_t lf = -1, li = -1
    cdef long long s = 0, s_i, cap, last
    cdef bint dead_f
    for t in range(p):
        ri = rows[t]
        s_i = s
        dead_f = hi[ri] < s_i
        if lf >= 0 and not dead_f:
            rlf = rows[lf]
            last = -1
            for j in range(s_i, q - 1):
                if D[rlf, j] > D[ri, j]:
                    last = j
            if last >= 0:
                if last + 1 > hi[ri]:
                    s_i = hi[ri] + 1
                    dead_f = True
                else:
                    s_i = last + 1
        if li >= 0 and lo[ri] <= s_i - 1:
            cap = split[li] - 1
            if cap > 0:
                rli = rows[li]
                for j in range(cap):
                    if D[rli, j] > D[ri, j]:
                        return (0, li, t)
        split[t] = s_i
        if dead_f:
            bf[t] = q
        else:
            bf[t] = s_i
            lf = t
        if lo[ri] <= s_i - 1:
            binv[t] = s_i - 1
            li = t
        else:
            binv[t] = -1
        s = s_i
    return (1, -1, -1)
