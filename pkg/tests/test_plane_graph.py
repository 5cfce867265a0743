import numpy as np
import pytest

from planar_oracles.constants import INF
from planar_oracles.errors import (
    DanglingDart,
    DuplicateEdge,
    FormatError,
    NegativeLength,
    NonPlanarRotation,
)
from planar_oracles.generators import generate
from planar_oracles.plane_graph import (
    build_from_coordinates,
    build_from_rotation,
    load_graph,
    normalize,
    save_graph,
)
from planar_oracles.shortest_paths import apsp_oracle


def triangle():
    darts = [(0, 1, 1), (1, 2, 1), (2, 0, 1)]
    rotations = [[2, 0], [0, 1], [1, 2]]
    return build_from_rotation(3, darts, rotations)


def test_triangle_two_faces():
    g = triangle()
    assert g.n_faces == 2
    assert g.n_darts == 3
    assert g.n_edges == 3


def test_single_bidirected_edge_one_face():
    g = build_from_rotation(2, [(0, 1, 3), (1, 0, 7)], [[0], [0]])
    assert g.n_faces == 1
    assert g.n_edges == 1


def test_square_from_coordinates():
    pts = [(0, 0), (1, 0), (1, 1), (0, 1)]
    edges = [(0, 1, 1, 1), (1, 2, 1, 1), (2, 3, 1, 1), (3, 0, 1, 1)]
    g = build_from_coordinates(pts, edges)
    assert g.n_faces == 2
    walks = sorted(len(g.face_walk(f)) for f in range(g.n_faces))
    assert walks == [4, 4]


def test_face_walk_covers_every_half_edge_once():
    g = generate("delaunay", 40, 3)
    seen = np.concatenate([g.face_walk(f) for f in range(g.n_faces)])
    assert sorted(seen.tolist()) == list(range(g.n_half))


def test_rotation_clockwise_order():
    # Plus-shaped star: center 0 with arms right(1) up(2) left(3) down(4).
    pts = [(0, 0), (1, 0), (0, 1), (-1, 0), (0, -1)]
    edges = [(0, k, 1, 1) for k in (1, 2, 3, 4)]
    g = build_from_coordinates(pts, edges)
    heads = [int(g.he_head[h]) for h in g.vertex_half_edges(0)]
    i = heads.index(2)
    assert heads[i:] + heads[:i] == [2, 1, 4, 3]


def test_duplicate_dart_rejected():
    with pytest.raises(DuplicateEdge):
        build_from_rotation(2, [(0, 1, 1), (0, 1, 2)], [[0, 1], [0, 1]])


def test_negative_length_rejected():
    with pytest.raises(NegativeLength):
        build_from_rotation(2, [(0, 1, -1)], [[0], [0]])


def test_rotation_missing_edge_rejected():
    with pytest.raises(DanglingDart):
        build_from_rotation(3, [(0, 1, 1), (1, 2, 1)], [[0], [0], [1]])


def test_non_planar_rotation_rejected():
    # Planar K4 from a drawing, then a vertex rotation scrambled to a
    # non-planar rotation system.
    pts = [(0, 0), (2, 0), (-1, 2), (-1, -2)]
    pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
    darts = [(u, v, 1) for (u, v) in pairs]
    ok = build_from_coordinates(pts, [(u, v, 1, None) for (u, v) in pairs])
    assert ok.n_faces == 4
    rotations = []
    for v in range(4):
        rotations.append([int(ok.he_dart[h]) if ok.he_dart[h] >= 0
                          else int(ok.he_dart[h ^ 1])
                          for h in ok.vertex_half_edges(v)])
    assert build_from_rotation(4, darts, rotations).n_faces == 4
    bad = [r[:] for r in rotations]
    bad[0][0], bad[0][1] = bad[0][1], bad[0][0]
    with pytest.raises(NonPlanarRotation):
        build_from_rotation(4, darts, bad)


def test_one_way_dart_gets_infinite_twin():
    g = build_from_rotation(2, [(0, 1, 5)], [[0], [0]])
    h = int(g.dart_he[0])
    assert g.he_len[h] == 5
    assert g.he_len[h ^ 1] == INF


@pytest.mark.parametrize("kind", ["grid", "delaunay", "random"])
def test_normalize_max_degree_three(kind):
    g = generate(kind, 64, 2)
    ng = normalize(g)
    assert max(ng.graph.degree(v) for v in range(ng.graph.n)) <= 3
    assert ng.reverse_map[ng.forward_map[np.arange(g.n)]].tolist() == list(range(g.n))


@pytest.mark.parametrize("seed", range(1, 11))
def test_normalize_preserves_distances(seed):
    g = generate(("grid", "delaunay", "random")[seed % 3], 30 + seed, seed)
    ng = normalize(g)
    d0 = apsp_oracle(g)
    d1 = apsp_oracle(ng.graph)
    fm = ng.forward_map
    assert np.array_equal(d0, d1[np.ix_(fm, fm)])


def test_save_load_rot_round_trip(tmp_path):
    g = generate("delaunay", 30, 5)
    p = tmp_path / "g.pg"
    save_graph(g, p)
    g2 = load_graph(p)
    assert g2.n == g.n and g2.n_darts == g.n_darts
    assert np.array_equal(apsp_oracle(g), apsp_oracle(g2))
    # Embedding preserved, not just the metric.
    assert g2.n_faces == g.n_faces


def test_load_xy_mode(tmp_path):
    p = tmp_path / "g.pg"
    p.write_text("pg 1 3 3\n0 1 1\n1 2 1\n2 0 1\nxy\n0 0\n1 0\n0 1\n")
    g = load_graph(p)
    assert g.n_faces == 2


def test_load_bad_header(tmp_path):
    p = tmp_path / "g.pg"
    p.write_text("pg 2 1 1\n")
    with pytest.raises(FormatError):
        load_graph(p)
