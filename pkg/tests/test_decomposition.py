import numpy as np
import pytest

from planar_oracles.decomposition import (
    MAX_HOLES,
    build_tree,
    cycle_separator,
    level_view,
    r_division,
)
from planar_oracles.errors import TooSmall, VertexInPiece
from planar_oracles.generators import generate
from planar_oracles.plane_graph import build_from_rotation, normalize

# Pinned decomposition constants, asserted on every tested instance.
C_PIECES = 24
C_BOUNDARY = 14
C_SEPARATOR = 16


def make(kind, n, seed):
    return normalize(generate(kind, n, seed))


@pytest.fixture(scope="module")
def grid81():
    ng = make("grid", 81, 1)
    return ng, build_tree(ng)


def test_single_triangle_tree():
    darts = []
    for (u, v) in ((0, 1), (1, 2), (2, 0)):
        darts.append((u, v, 1))
        darts.append((v, u, 1))
    g = build_from_rotation(3, darts, [[4, 0], [0, 2], [2, 4]])
    tree = build_tree(normalize(g))
    leaves = [p for p in tree.pieces if p.is_leaf]
    assert len(leaves) == 3
    assert all(len(p.edges) == 1 for p in leaves)
    assert tree.depth() <= 2


def test_single_edge_piece_too_small(grid81):
    ng, tree = grid81
    leaf = next(p for p in tree.pieces if p.is_leaf)
    with pytest.raises(TooSmall):
        cycle_separator(tree.g, leaf)


def test_every_edge_in_exactly_one_leaf(grid81):
    ng, tree = grid81
    cover = np.concatenate([p.edges for p in tree.pieces if p.is_leaf])
    assert sorted(cover.tolist()) == list(range(tree.g.n_edges))


def test_piece_invariants_sweep(grid81):
    ng, tree = grid81
    g = tree.g
    full_deg = np.bincount(g.he_tail, minlength=g.n)
    for p in tree.pieces:
        assert len(p.holes) <= MAX_HOLES
        # Boundary definition: incident to an edge outside the piece.
        tails = np.concatenate([g.he_tail[2 * p.edges], g.he_tail[2 * p.edges + 1]])
        deg_in = np.bincount(tails, minlength=g.n)
        expect = p.vertices[deg_in[p.vertices] < full_deg[p.vertices]]
        assert np.array_equal(p.boundary, expect)
        assert len(p.boundary) <= C_BOUNDARY * np.sqrt(len(p.vertices))


def test_boundary_inheritance(grid81):
    ng, tree = grid81
    for p in tree.pieces:
        if p.is_leaf:
            continue
        child_boundary = set()
        for c in p.children:
            child_boundary.update(tree.pieces[c].boundary.tolist())
        assert set(p.boundary.tolist()) <= child_boundary


def test_separator_bounds_on_random_pieces():
    rng = np.random.default_rng(7)
    checked = 0
    for seed in range(1, 5):
        ng = make(("grid", "delaunay", "random")[seed % 3], 100, seed)
        tree = build_tree(ng)
        pool = [p for p in tree.pieces
                if len(p.vertices) >= 12 and len(p.edges) >= len(p.vertices) - 1]
        for p in pool:
            if checked >= 200:
                break
            try:
                sep, ea, eb = cycle_separator(tree.g, p)
            except TooSmall:
                continue
            checked += 1
            assert len(sep) <= C_SEPARATOR * np.sqrt(len(p.vertices))
            assert len(ea) + len(eb) == len(p.edges)
            assert set(ea.tolist()).isdisjoint(eb.tolist())
    assert checked >= 50


@pytest.mark.parametrize("kind,n", [("grid", 400), ("delaunay", 400),
                                    ("random", 400)])
@pytest.mark.parametrize("r", [16, 64, 256])
def test_r_division_invariants(kind, n, r):
    ng = make(kind, n, 2)
    tree = build_tree(ng)
    div = r_division(tree, r)
    g = tree.g
    ps = div.pieces
    assert len(ps) <= C_PIECES * g.n / r
    cover = np.concatenate([p.edges for p in ps])
    assert sorted(cover.tolist()) == list(range(g.n_edges))
    for p in ps:
        assert len(p.vertices) <= r or p.is_leaf
        assert len(p.boundary) <= C_BOUNDARY * np.sqrt(r)
        assert len(p.holes) <= MAX_HOLES
    # canonical piece: lowest id containing each vertex
    for v in range(0, g.n, 17):
        owner = int(div.canonical_piece[v])
        B = tree.pieces[owner]
        assert v in B.vertices
        assert owner == min(div.pieces_of_vertex(v))


def test_r_division_whole_graph(grid81):
    ng, tree = grid81
    div = r_division(tree, tree.g.n + 1)
    assert div.piece_ids == [0]
    assert len(div.pieces[0].boundary) == 0


def test_r_division_at_leaves(grid81):
    ng, tree = grid81
    div = r_division(tree, 2)
    assert all(tree.pieces[i].is_leaf or len(tree.pieces[i].vertices) <= 2
               for i in div.piece_ids)


def test_level_view_p2_is_every_level(grid81):
    ng, tree = grid81
    cuts = level_view(tree, 2)
    assert len(cuts) == tree.depth() + 1
    for d, cut in enumerate(cuts):
        for pid in cut:
            p = tree.pieces[pid]
            assert p.depth == d or (p.is_leaf and p.depth < d)


def test_level_view_large_p(grid81):
    ng, tree = grid81
    cuts = level_view(tree, 2 ** tree.depth() + 2)
    assert len(cuts) == 2
    assert cuts[0] == [0]
    assert sorted(cuts[1]) == sorted(p.id for p in tree.pieces if p.is_leaf)


def test_level_view_cuts_nest_and_partition(grid81):
    ng, tree = grid81
    cuts = level_view(tree, 4)
    m = tree.g.n_edges
    for cut in cuts:
        cover = np.concatenate([tree.pieces[i].edges for i in cut])
        assert sorted(cover.tolist()) == list(range(m))
    # stride between stored depths is ceil(log2 p) = 2
    for a, b in zip(cuts, cuts[1:]):
        da = max(tree.pieces[i].depth for i in a)
        db = max(tree.pieces[i].depth for i in b)
        assert db - da <= 2


def test_hole_of_two_piece_division():
    ng = make("grid", 16, 3)
    tree = build_tree(ng)
    # find a division with >= 2 pieces
    div = r_division(tree, max(2, tree.g.n // 2))
    assert len(div.piece_ids) >= 2
    for pid in div.piece_ids:
        B = tree.pieces[pid]
        internal = sorted(set(B.vertices.tolist()) - set(B.boundary.tolist()))
        if internal:
            with pytest.raises(VertexInPiece):
                div.hole_of(pid, internal[0])
        outside = sorted(set(range(tree.g.n)) - set(B.vertices.tolist()))
        for v in outside[:10]:
            h = div.hole_of(pid, v)
            assert 0 <= h < len(B.holes)


def test_hole_of_region_membership():
    ng = make("delaunay", 100, 5)
    tree = build_tree(ng)
    div = r_division(tree, 40)
    g = tree.g
    for pid in div.piece_ids[:4]:
        B = tree.pieces[pid]
        in_b = set(B.vertices.tolist())
        region, hole_by_region = div._hole_map(pid)
        for v in range(0, g.n, 13):
            if v in in_b:
                continue
            h = div.hole_of(pid, v)
            # every incident face of v maps to the same hole region
            for he in g.vertex_half_edges(v):
                r = int(region[g.face_of[he]])
                assert hole_by_region[r] == h
