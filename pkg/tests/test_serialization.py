import numpy as np
import pytest

from planar_oracles import oracle_fastprep as ofp
from planar_oracles import oracle_fastquery as ofq
from planar_oracles import oracle_linear as olin
from planar_oracles import serialization as ser
from planar_oracles.errors import FormatError
from planar_oracles.generators import generate
from planar_oracles.plane_graph import normalize


@pytest.fixture(scope="module")
def setup():
    g = generate("delaunay", 90, 2)
    return g, normalize(g)


def test_codec_round_trip():
    val = {"a": 1, "b": None, (2, 3): np.arange(6).reshape(2, 3),
           "c": [True, 2.5, "text", b"\x00\xff",
                 np.zeros(0, dtype=np.int32)],
           "d": {"nested": (1, 2, "x")}}
    out = bytearray()
    ser._enc(out, val)
    back, pos = ser._dec(memoryview(bytes(out)), 0)
    assert pos == len(out)
    assert back["a"] == 1 and back["b"] is None
    assert np.array_equal(back[(2, 3)], val[(2, 3)])
    assert back["c"][:4] == [True, 2.5, "text", b"\x00\xff"]
    assert back["c"][4].dtype == np.int32 and back["c"][4].size == 0
    assert back["d"]["nested"] == (1, 2, "x")


def test_graph_round_trip(tmp_path, setup):
    g, _ = setup
    path = tmp_path / "g.plgr"
    ser.save_graph(path, g)
    g2 = ser.load_graph(path)
    for name in ser._GRAPH_ARRAYS:
        assert np.array_equal(getattr(g, name), getattr(g2, name))
    assert (g.n, g.n_faces) == (g2.n, g2.n_faces)
    # Deterministic: saving the loaded graph is byte-identical.
    ser.save_graph(path.with_suffix(".2"), g2)
    assert path.read_bytes() == path.with_suffix(".2").read_bytes()


def test_bad_magic_and_version(tmp_path, setup):
    g, _ = setup
    path = tmp_path / "g.plgr"
    ser.save_graph(path, g)
    data = bytearray(path.read_bytes())
    with pytest.raises(FormatError):
        ser._unpack(bytes(b"XXXX" + data[4:]), ser.GRAPH_MAGIC)
    data[4] = 99
    with pytest.raises(FormatError):
        ser._unpack(bytes(data), ser.GRAPH_MAGIC)


def _identical_queries(build, query, load, n, seed):
    rng = np.random.default_rng(seed)
    o = build()
    o2 = load(o)
    for _ in range(100):
        u, v = int(rng.integers(n)), int(rng.integers(n))
        assert query(o2, u, v) == query(o, u, v)


@pytest.mark.parametrize("kind", ["linear", "fastprep", "fastquery"])
def test_oracle_round_trip(tmp_path, setup, kind):
    g, ng = setup
    path = tmp_path / f"{kind}.plor"

    def load(o):
        ser.save_oracle(path, o)
        return ser.load_oracle(path)

    if kind == "linear":
        _identical_queries(lambda: olin.build(ng, 4), olin.query, load, g.n, 1)
    elif kind == "fastprep":
        _identical_queries(lambda: ofp.build(ng, 32), ofp.query, load, g.n, 2)
    else:
        _identical_queries(lambda: ofq.build(ng, 32, eager=True), ofq.query,
                           load, g.n, 3)


def test_not_an_oracle():
    with pytest.raises(FormatError):
        ser.oracle_bytes(object())
