import numpy as np
import pytest

from planar_oracles import oracle_fastprep as ofp
from planar_oracles.constants import INF
from planar_oracles.decomposition import build_tree
from planar_oracles.errors import BadParams, UnknownVertex
from planar_oracles.generators import generate
from planar_oracles.plane_graph import normalize
from planar_oracles.shortest_paths import LocalGraph, apsp_oracle


@pytest.fixture(scope="module")
def grid81():
    g = generate("grid", 81, 1)
    ng = normalize(g)
    tree = build_tree(ng)
    return g, ng, tree, apsp_oracle(g), apsp_oracle(ng.graph)


def test_r_for_space():
    assert ofp.r_for_space(100, 10000) == 2
    assert ofp.r_for_space(100, 100) == 100
    assert ofp.r_for_space(100, 625) == 16


def test_bad_r(grid81):
    g, ng, tree, _, _ = grid81
    with pytest.raises(BadParams):
        ofp.build(ng, 1, tree)


def test_whole_graph_piece(grid81):
    g, ng, tree, truth, _ = grid81
    o = ofp.build(ng, ng.graph.n, tree)
    assert len(o.div.piece_ids) == 1
    assert o.part_i_words() == 0 and o.part_iii_words() == 0
    rng = np.random.default_rng(0)
    for _ in range(60):
        u, v = int(rng.integers(g.n)), int(rng.integers(g.n))
        assert ofp.query(o, u, v) == truth[u, v]


def test_part_iii_matches_filtered_dijkstra(grid81):
    g, ng, tree, _, _ = grid81
    o = ofp.build(ng, 20, tree)
    gg = tree.g
    in_piece = np.zeros(gg.n_edges, dtype=bool)
    for (pid, hi), p3 in list(o.part_iii.items())[:6]:
        B = tree.pieces[pid]
        in_piece[:] = False
        in_piece[B.edges] = True
        region, hole_by_region = o.div._hole_map(pid)
        outside = np.flatnonzero(~in_piece)
        hole_edges = outside[[
            hole_by_region[int(region[gg.face_of[2 * e]])] == hi
            for e in outside]]
        if len(hole_edges) == 0:
            continue
        lg = LocalGraph(gg, hole_edges)
        for i, x in enumerate(p3.x):
            xl = lg.local(int(x))
            if xl < 0:
                continue
            d = lg.dijkstra(xl)
            for j, c in enumerate(p3.cols):
                cl = lg.local(int(c))
                want = 0 if c == x else (INF if cl < 0 else int(d[cl]))
                assert p3.mat[i, j] == want


@pytest.mark.parametrize("r", [16, 64])
def test_part_ii_matches_within_piece_dijkstra(grid81, r):
    g, ng, tree, _, _ = grid81
    o = ofp.build(ng, r, tree)
    gg = tree.g
    rng = np.random.default_rng(r)
    for pid in o.div.piece_ids[:5]:
        B = tree.pieces[pid]
        lg = LocalGraph(gg, B.edges, B.vertices)
        for _ in range(20):
            u, v = rng.choice(B.vertices, 2)
            o.last_touches = 0
            got = ofp.part_ii_query(o, pid, int(u), int(v))
            want = int(lg.dijkstra(lg.local(int(u)))[lg.local(int(v))]) \
                if u != v else 0
            assert got == want
            assert o.last_touches <= 16 * np.sqrt(max(r, len(B.vertices)))


def test_within_piece_uses_boundary_detour():
    # Path graph folded so the in-piece route is long but the global route
    # leaves and re-enters the piece: within-piece query must beat d_B.
    g = generate("grid", 36, 2)
    ng = normalize(g)
    tree = build_tree(ng)
    o = ofp.build(ng, 12, tree)
    truth = apsp_oracle(ng.graph)
    hit = 0
    for pid in o.div.piece_ids:
        B = tree.pieces[pid]
        lg = LocalGraph(tree.g, B.edges, B.vertices)
        for u in B.vertices[:8]:
            for v in B.vertices[:8]:
                if u == v:
                    continue
                db = int(lg.dijkstra(lg.local(int(u)))[lg.local(int(v))])
                got = ofp.query_within_piece(o, pid, int(u), int(v))
                assert got == truth[u, v]
                if db > truth[u, v]:
                    hit += 1
    assert hit > 0


@pytest.mark.parametrize("r", [16, 64])
def test_exhaustive_grid81(grid81, r):
    g, ng, tree, truth, _ = grid81
    o = ofp.build(ng, r, tree)
    for u in range(g.n):
        for v in range(g.n):
            assert ofp.query(o, u, v) == truth[u, v]
    assert o.branch_counts["within"] > 0
    assert o.branch_counts["cross"] > 0


@pytest.mark.parametrize("kind,seed", [("delaunay", 3), ("random", 4)])
def test_random_pairs(kind, seed):
    g = generate(kind, 150, seed)
    ng = normalize(g)
    o = ofp.build(ng, 32)
    truth = apsp_oracle(g)
    rng = np.random.default_rng(seed)
    for _ in range(500):
        u, v = int(rng.integers(g.n)), int(rng.integers(g.n))
        assert ofp.query(o, u, v) == truth[u, v]
    assert o.branch_counts["cross"] > 0


def test_touch_bounds(grid81):
    g, ng, tree, truth, _ = grid81
    rng = np.random.default_rng(9)
    for r in (16, 64):
        o = ofp.build(ng, r, tree)
        for _ in range(200):
            u, v = int(rng.integers(g.n)), int(rng.integers(g.n))
            ofp.query(o, u, v)
            bound_within = 40 * np.sqrt(r)
            bound_cross = 24 * np.sqrt(r) * np.log2(r)
            assert o.last_touches <= max(bound_within, bound_cross)


def test_space_bound(grid81):
    g, ng, tree, _, _ = grid81
    n = ng.graph.n
    for r in (16, 64, 256):
        o = ofp.build(ng, min(r, n), tree)
        assert o.space_words <= 40 * (n * n / r + n * np.sqrt(r))


def test_unknown_vertex(grid81):
    g, ng, tree, _, _ = grid81
    o = ofp.build(ng, 27, tree)
    with pytest.raises(UnknownVertex):
        ofp.query(o, 0, g.n)
