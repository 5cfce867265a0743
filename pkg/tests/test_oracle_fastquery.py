import numpy as np
import pytest

from planar_oracles import oracle_fastprep as ofp
from planar_oracles import oracle_fastquery as ofq
from planar_oracles.constants import INF
from planar_oracles.decomposition import build_tree
from planar_oracles.errors import BadParams, UnknownVertex
from planar_oracles.generators import generate
from planar_oracles.plane_graph import normalize
from planar_oracles.shortest_paths import apsp_oracle


@pytest.fixture(scope="module")
def grid81():
    g = generate("grid", 81, 1)
    ng = normalize(g)
    tree = build_tree(ng)
    return g, ng, tree, apsp_oracle(g)


@pytest.fixture(scope="module")
def oracle16(grid81):
    g, ng, tree, _ = grid81
    return ofq.build(ng, 16, tree)


def _facing_pairs(o, limit=None):
    out = []
    for b in o.div.piece_ids:
        for b2 in o.div.piece_ids:
            if b != b2:
                out.append((b, b2))
                if limit and len(out) >= limit:
                    return out
    return out


def test_bad_r(grid81):
    g, ng, tree, _ = grid81
    with pytest.raises(BadParams):
        ofq.build(ng, 1, tree)
    with pytest.raises(BadParams):
        ofq.build(ng, ng.graph.n + 1, tree)


def test_dj_matches_unrestricted_distances(oracle16):
    # The wedge-restricted occurrence matrix must collapse to the plain
    # vertex-to-vertex distance through J when minimized over occurrences.
    o = oracle16
    checked = 0
    for b, b2 in _facing_pairs(o, 12):
        js = ofq._JSearch(o, b, b2)
        ctx = ofq._get_context(o, b, b2)
        if ctx.dj.size == 0:
            continue
        for x in np.unique(ctx.x)[:4]:
            d = js.distances(int(x))
            rows = np.flatnonzero(ctx.x == x)
            for y in np.unique(ctx.y)[:6]:
                want = 0 if x == y else int(d[int(y)])
                cols = np.flatnonzero(ctx.y == y)
                got = int(ctx.dj[np.ix_(rows, cols)].min())
                assert (got >= INF) == (want >= INF)
                if want < INF:
                    assert got == want
                checked += 1
    assert checked > 40


def test_dj_zero_on_shared_vertices(oracle16):
    o = oracle16
    for b, b2 in _facing_pairs(o, 20):
        ctx = ofq._get_context(o, b, b2)
        for i, x in enumerate(ctx.x):
            for j, y in enumerate(ctx.y):
                if x == y:
                    assert ctx.dj[i, j] == 0


def test_ell_ranks_non_decreasing(oracle16):
    o = oracle16
    seen = 0
    for b, b2 in _facing_pairs(o):
        ctx = ofq._get_context(o, b, b2)
        ranks = ctx.ell[ctx.ell >= 0]
        assert np.all(np.diff(ranks) >= 0)
        seen += len(ranks)
    assert seen > 100


def test_split_bounds_shape(oracle16):
    # The stored split is monotone over every row, and the per-part bounds
    # agree with it on staircase rows (modulo the dead markers).
    o = oracle16
    for b, b2 in _facing_pairs(o, 40):
        ctx = ofq._get_context(o, b, b2)
        assert np.all(np.diff(ctx.split) >= 0)
        q = ctx.dj.shape[1]
        live_f = ctx.falling < q
        assert np.all(ctx.falling[live_f] == ctx.split[live_f])
        live_i = ctx.inverse >= 0
        assert np.all(ctx.inverse[live_i] == ctx.split[live_i] - 1)


def test_compute_ell_endpoint_is_nearest(oracle16):
    o = oracle16
    checked = 0
    for b, b2 in _facing_pairs(o, 8):
        ctx = ofq._get_context(o, b, b2)
        if len(ctx.y) == 0:
            continue
        js = ofq._JSearch(o, b, b2)
        for x in np.unique(ctx.x)[:3]:
            rank = ofq.compute_ell(o, ctx, int(x))
            d = js.distances(int(x))
            dy = np.asarray([0 if y == x else int(d[int(y)]) for y in ctx.y])
            if rank == -1:
                assert dy.size == 0 or dy.min() >= INF
            else:
                assert dy[rank] == dy.min() < INF
            checked += 1
    assert checked > 10


def test_cross_piece_equals_brute_scan(oracle16, grid81):
    # The two staircase searches plus the evicted-row scan must equal a
    # full scan of leg + matrix + leg over all occurrence pairs.
    g, ng, tree, _ = grid81
    o = oracle16
    rng = np.random.default_rng(5)
    checked = 0
    while checked < 60:
        u, v = int(rng.integers(g.n)), int(rng.integers(g.n))
        nu, nv = int(ng.forward_map[u]), int(ng.forward_map[v])
        pu = int(o.div.canonical_piece[nu])
        pv = int(o.div.canonical_piece[nv])
        if pu == pv or ofp._vtx_index(tree.pieces[pu].vertices, nv) >= 0 \
                or ofp._vtx_index(tree.pieces[pv].vertices, nu) >= 0:
            continue
        got = ofq.query_cross_piece(o, pu, pv, nu, nv)
        ctx = ofq._get_context(o, pu, pv)
        pi_u, pi_v = o.part_i[pu], o.part_i[pv]
        iu = ofp._vtx_index(pi_u.vtx, nu)
        iv = ofp._vtx_index(pi_v.vtx, nv)
        best = INF
        for i, x in enumerate(ctx.x):
            a = pi_u.bfrom[ofp._vtx_index(pi_u.boundary, x), iu]
            for j, y in enumerate(ctx.y):
                c = pi_v.bto[ofp._vtx_index(pi_v.boundary, y), iv]
                b = ctx.dj[i, j]
                if a < INF and b < INF and c < INF:
                    best = min(best, int(a) + int(b) + int(c))
        assert got == best
        checked += 1


@pytest.mark.parametrize("r", [16, 64])
def test_exhaustive_grid81(grid81, r):
    g, ng, tree, truth = grid81
    o = ofq.build(ng, r, tree)
    for u in range(g.n):
        for v in range(g.n):
            assert ofq.query(o, u, v) == truth[u, v]
    assert o.branch_counts["within"] > 0
    assert o.branch_counts["cross"] > 0


@pytest.mark.parametrize("kind,seed", [("delaunay", 3), ("random", 4)])
def test_random_pairs(kind, seed):
    g = generate(kind, 150, seed)
    ng = normalize(g)
    o = ofq.build(ng, 32)
    truth = apsp_oracle(g)
    rng = np.random.default_rng(seed)
    for _ in range(500):
        u, v = int(rng.integers(g.n)), int(rng.integers(g.n))
        assert ofq.query(o, u, v) == truth[u, v]
    assert o.branch_counts["cross"] > 0


def test_cross_touch_bound(grid81, oracle16):
    g, ng, tree, _ = grid81
    o = oracle16
    rng = np.random.default_rng(7)
    hits = 0
    for _ in range(400):
        u, v = int(rng.integers(g.n)), int(rng.integers(g.n))
        nu, nv = int(ng.forward_map[u]), int(ng.forward_map[v])
        pu = int(o.div.canonical_piece[nu])
        pv = int(o.div.canonical_piece[nv])
        if pu == pv or ofp._vtx_index(tree.pieces[pu].vertices, nv) >= 0 \
                or ofp._vtx_index(tree.pieces[pv].vertices, nu) >= 0:
            continue
        o.last_touches = 0
        ofq.query_cross_piece(o, pu, pv, nu, nv)
        ctx = ofq._get_context(o, pu, pv)
        assert o.last_touches <= 24 * (len(ctx.x) + len(ctx.y)) + 8
        hits += 1
    assert hits > 50


def test_space_bounds(grid81):
    g, ng, tree, _ = grid81
    n = ng.graph.n
    for r in (16, 64):
        o = ofq.build(ng, r, tree, eager=True)
        assert o.space_words <= 80 * (n * n / r + n * np.sqrt(r))
        assert o.part_iv_words() <= 48 * n * n / r
        assert o.part_v_words() <= 40 * n * n / r ** 1.5


def test_trivial_queries(oracle16, grid81):
    g = grid81[0]
    assert ofq.query(oracle16, 5, 5) == 0
    with pytest.raises(UnknownVertex):
        ofq.query(oracle16, 0, g.n)


def test_weight_cap():
    g = generate("grid", 9, 1, weight_range=(1, 4))
    g.he_len[g.he_len < INF] = 1 << 42
    ng = normalize(g)
    with pytest.raises(BadParams):
        ofq.build(ng, 4)
