"""Matrix-searching kit: Monge verification, SMAWK row minima, global
minimum, and staircase partial-matrix minima.

All searches run on implicit accessors so they can operate directly on the
oracles' stored parts.  Blanks in staircase matrices are never materialized:
they compare above every finite value through a lexicographic key (with the
column order reversed among blanks), which keeps the filled matrix totally
monotone without any magnitude arithmetic.
"""

from __future__ import annotations

import numpy as np

from .constants import INF
from .errors import PlanarOracleError

__all__ = ["ImplicitMatrix", "StaircaseMatrix", "is_monge",
           "smawk_row_minima", "monge_min", "staircase_min", "Empty"]


class Empty(PlanarOracleError):
    """Staircase matrix with no non-blank entry."""


class ImplicitMatrix:
    """p x q matrix given by an O(1) entry accessor; counts accessor calls."""

    def __init__(self, p: int, q: int, entry):
        self.p = p
        self.q = q
        self._entry = entry
        self.calls = 0

    def __call__(self, i: int, j: int) -> int:
        self.calls += 1
        return self._entry(i, j)

    @staticmethod
    def from_array(a) -> "ImplicitMatrix":
        a = np.asarray(a)
        return ImplicitMatrix(a.shape[0], a.shape[1], lambda i, j: int(a[i, j]))


class StaircaseMatrix:
    """Implicit matrix with one non-blank column interval per row.

    falling:          row i non-blank on [start[i], q), start non-decreasing.
    inverse-falling:  row i non-blank on [0, end[i]], end non-decreasing.
    """

    def __init__(self, matrix: ImplicitMatrix, orientation: str, bounds):
        if orientation not in ("falling", "inverse-falling"):
            raise ValueError(orientation)
        self.matrix = matrix
        self.orientation = orientation
        self.bounds = np.asarray(bounds, dtype=np.int64)
        if self.bounds.shape[0] != matrix.p:
            raise ValueError("one bound per row required")
        if orientation == "falling":
            live = self.bounds < matrix.q
        else:
            live = self.bounds >= 0
        b = self.bounds[live]
        if b.size and np.any(np.diff(b) < 0):
            raise ValueError("staircase bounds must be non-decreasing")


def _sat_add(a, b):
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    out = a + b
    out[(a >= INF) | (b >= INF)] = INF
    return out


def is_monge(m) -> bool:
    """Adjacent-quadruple Monge check (sufficient by composition);
    INF entries are treated as a formal infinity with saturating sums."""
    m = np.asarray(m, dtype=np.int64)
    if m.shape[0] < 2 or m.shape[1] < 2:
        return True
    lhs = _sat_add(m[:-1, :-1], m[1:, 1:])
    rhs = _sat_add(m[:-1, 1:], m[1:, :-1])
    return bool(np.all(lhs <= rhs))


def _smawk(rows, cols, key, out):
    if not rows:
        return
    stack = []
    for c in cols:
        while stack:
            r = rows[len(stack) - 1]
            if key(r, c) < key(r, stack[-1]):
                stack.pop()
            else:
                break
        if len(stack) < len(rows):
            stack.append(c)
    cols = stack
    _smawk(rows[1::2], cols, key, out)
    col_index = {c: i for i, c in enumerate(cols)}
    start = 0
    for i in range(0, len(rows), 2):
        r = rows[i]
        stop = col_index[out[rows[i + 1]]] if i + 1 < len(rows) else len(cols) - 1
        best_c = cols[start]
        best_v = key(r, best_c)
        for ci in range(start + 1, stop + 1):
            v = key(r, cols[ci])
            if v < best_v:
                best_c, best_v = cols[ci], v
        out[r] = best_c
        start = stop


def smawk_row_minima(m: ImplicitMatrix, key=None) -> np.ndarray:
    """Leftmost argmin column per row of a totally monotone matrix."""
    cache = {}
    base = key if key is not None else (lambda i, j: (m(i, j), j))

    def k(i, j):
        v = cache.get((i, j))
        if v is None:
            v = cache[(i, j)] = base(i, j)
        return v

    out = {}
    _smawk(list(range(m.p)), list(range(m.q)), k, out)
    return np.asarray([out[i] for i in range(m.p)], dtype=np.int64)


def monge_min(m: ImplicitMatrix) -> tuple[int, int, int]:
    """Global minimum entry; ties to the lexicographically smallest (i, j)."""
    args = smawk_row_minima(m)
    bi, bj, bv = -1, -1, None
    for i in range(m.p):
        v = m(i, int(args[i]))
        if bv is None or v < bv:
            bi, bj, bv = i, int(args[i]), v
    return bi, bj, bv


def staircase_min(s: StaircaseMatrix) -> tuple[int, int, int]:
    """Minimum over non-blank entries; raises Empty when there are none.

    Blanks sort above all finite values; among blanks the column order is
    reversed, which makes the filled falling staircase totally monotone.
    An inverse falling staircase is searched by reversing both axes.
    """
    m, q = s.matrix, s.matrix.q
    if s.orientation == "falling":
        rows = [i for i in range(m.p) if s.bounds[i] < q]
        starts = {i: int(s.bounds[i]) for i in rows}
        entry = m
        rmap, cmap = (lambda i: i), (lambda j: j)
    else:
        rows = [m.p - 1 - i for i in range(m.p) if s.bounds[i] >= 0]
        rows.sort()
        starts = {m.p - 1 - i: q - 1 - int(s.bounds[i])
                  for i in range(m.p) if s.bounds[i] >= 0}
        entry = lambda i, j: m(m.p - 1 - i, q - 1 - j)
        rmap, cmap = (lambda i: m.p - 1 - i), (lambda j: q - 1 - j)
    if not rows or q == 0:
        raise Empty("all entries blank")

    def key(i, j):
        if j < starts[i]:
            return (1, 0, -j)
        return (0, entry(i, j), j)

    out = {}
    cache = {}

    def k(i, j):
        v = cache.get((i, j))
        if v is None:
            v = cache[(i, j)] = key(i, j)
        return v

    _smawk(rows, list(range(q)), k, out)
    best = None
    for i in rows:
        kv = k(i, out[i])
        if kv[0] == 0 and (best is None or kv[1] < best[2]):
            best = (rmap(i), cmap(out[i]), kv[1])
    if best is None:
        raise Empty("all entries blank")
    return best
