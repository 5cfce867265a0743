"""Versioned binary files for graphs and built oracles.

Layout: a 4-byte magic, a little-endian u16 format version, then one encoded
value.  Values are tagged and length-prefixed (all integers little-endian
fixed width), so every section can be skipped without understanding it:

========  =======================================================
tag byte  payload
========  =======================================================
``N``     none
``B``     u8 bool
``I``     i64
``F``     f64
``S``     u64 byte length + UTF-8 text
``Y``     u64 byte length + raw bytes
``A``     dtype string, u8 rank, u64 dims, raw C-order bytes
``L``     u64 element count + encoded elements
``T``     same as ``L``, decoded as a tuple
``D``     u64 entry count + encoded key/value pairs
========  =======================================================

Oracle files store the normalized graph and every table the queries read;
loading reconstructs the oracle without rebuilding, so a round trip answers
every query identically.  Derived caches (CSR adjacency, hole maps, the
level index) are recomputed on load.
"""

from __future__ import annotations

import struct

import numpy as np

from . import ddg as _ddg
from . import oracle_fastprep as _ofp
from . import oracle_fastquery as _ofq
from . import oracle_linear as _olin
from .decomposition import DecompositionTree, Hole, Piece, RDivision
from .errors import FormatError
from .plane_graph import NormalizedGraph, PlaneGraph

__all__ = ["save_graph", "load_graph", "save_oracle", "load_oracle",
           "oracle_bytes", "GRAPH_MAGIC", "ORACLE_MAGIC", "FORMAT_VERSION"]

GRAPH_MAGIC = b"PLGR"
ORACLE_MAGIC = b"PLOR"
FORMAT_VERSION = 1


# ---------------------------------------------------------------------------
# Tagged value codec

def _enc(out: bytearray, v) -> None:
    if v is None:
        out += b"N"
    elif isinstance(v, (bool, np.bool_)):
        out += b"B" + struct.pack("<B", int(v))
    elif isinstance(v, (int, np.integer)):
        out += b"I" + struct.pack("<q", int(v))
    elif isinstance(v, (float, np.floating)):
        out += b"F" + struct.pack("<d", float(v))
    elif isinstance(v, str):
        b = v.encode()
        out += b"S" + struct.pack("<Q", len(b)) + b
    elif isinstance(v, (bytes, bytearray)):
        out += b"Y" + struct.pack("<Q", len(v)) + bytes(v)
    elif isinstance(v, np.ndarray):
        a = np.ascontiguousarray(v)
        if a.dtype.byteorder == ">":
            a = a.astype(a.dtype.newbyteorder("<"))
        dt = a.dtype.str.lstrip("=|<").encode()
        out += b"A" + struct.pack("<B", len(dt)) + dt
        out += struct.pack("<B", a.ndim)
        out += struct.pack(f"<{a.ndim}Q", *a.shape)
        out += a.tobytes()
    elif isinstance(v, tuple):
        out += b"T" + struct.pack("<Q", len(v))
        for x in v:
            _enc(out, x)
    elif isinstance(v, list):
        out += b"L" + struct.pack("<Q", len(v))
        for x in v:
            _enc(out, x)
    elif isinstance(v, dict):
        out += b"D" + struct.pack("<Q", len(v))
        for k, x in v.items():
            _enc(out, k)
            _enc(out, x)
    else:
        raise FormatError(f"unserializable value of type {type(v).__name__}")


def _dec(buf: memoryview, pos: int):
    tag = bytes(buf[pos:pos + 1])
    pos += 1
    if tag == b"N":
        return None, pos
    if tag == b"B":
        return bool(buf[pos]), pos + 1
    if tag == b"I":
        return struct.unpack_from("<q", buf, pos)[0], pos + 8
    if tag == b"F":
        return struct.unpack_from("<d", buf, pos)[0], pos + 8
    if tag in (b"S", b"Y"):
        (k,) = struct.unpack_from("<Q", buf, pos)
        pos += 8
        raw = bytes(buf[pos:pos + k])
        return (raw.decode() if tag == b"S" else raw), pos + k
    if tag == b"A":
        dl = buf[pos]
        pos += 1
        dt = np.dtype("<" + bytes(buf[pos:pos + dl]).decode())
        pos += dl
        nd = buf[pos]
        pos += 1
        shape = struct.unpack_from(f"<{nd}Q", buf, pos)
        pos += 8 * nd
        count = int(np.prod(shape, dtype=np.int64)) if nd else 1
        nbytes = count * dt.itemsize
        a = np.frombuffer(buf[pos:pos + nbytes], dtype=dt).reshape(shape)
        return a.copy(), pos + nbytes
    if tag in (b"L", b"T"):
        (k,) = struct.unpack_from("<Q", buf, pos)
        pos += 8
        out = []
        for _ in range(k):
            x, pos = _dec(buf, pos)
            out.append(x)
        return (tuple(out) if tag == b"T" else out), pos
    if tag == b"D":
        (k,) = struct.unpack_from("<Q", buf, pos)
        pos += 8
        out = {}
        for _ in range(k):
            key, pos = _dec(buf, pos)
            val, pos = _dec(buf, pos)
            out[key] = val
        return out, pos
    raise FormatError(f"bad value tag {tag!r} at offset {pos - 1}")


def _pack(magic: bytes, value) -> bytes:
    out = bytearray(magic + struct.pack("<H", FORMAT_VERSION))
    _enc(out, value)
    return bytes(out)


def _unpack(data: bytes, magic: bytes):
    if data[:4] != magic:
        raise FormatError(f"bad magic {data[:4]!r}, expected {magic!r}")
    (version,) = struct.unpack_from("<H", data, 4)
    if version != FORMAT_VERSION:
        raise FormatError(f"unsupported format version {version}")
    value, _ = _dec(memoryview(data), 6)
    return value


# ---------------------------------------------------------------------------
# Graphs

_GRAPH_ARRAYS = ["he_tail", "he_head", "he_len", "rot_next", "rot_prev",
                 "first_he", "face_of", "dart_tail", "dart_head", "dart_len",
                 "dart_he", "he_dart"]


def _graph_state(g: PlaneGraph) -> dict:
    st = {"n": g.n, "n_faces": g.n_faces, "coords": g.coords}
    for name in _GRAPH_ARRAYS:
        st[name] = getattr(g, name)
    return st


def _graph_from(st: dict) -> PlaneGraph:
    return PlaneGraph(n=st["n"], n_faces=st["n_faces"], coords=st["coords"],
                      **{name: st[name] for name in _GRAPH_ARRAYS})


def _ng_state(ng: NormalizedGraph) -> dict:
    return {"graph": _graph_state(ng.graph), "forward_map": ng.forward_map,
            "reverse_map": ng.reverse_map}


def _ng_from(st: dict) -> NormalizedGraph:
    return NormalizedGraph(graph=_graph_from(st["graph"]),
                           forward_map=st["forward_map"],
                           reverse_map=st["reverse_map"])


def save_graph(path, g: PlaneGraph) -> None:
    with open(path, "wb") as f:
        f.write(_pack(GRAPH_MAGIC, _graph_state(g)))


def load_graph(path) -> PlaneGraph:
    with open(path, "rb") as f:
        return _graph_from(_unpack(f.read(), GRAPH_MAGIC))


# ---------------------------------------------------------------------------
# Decomposition structures

def _tree_state(t: DecompositionTree) -> dict:
    return {
        "leaf_edge_count": t.leaf_edge_count,
        "c_b_observed": t.c_b_observed,
        "pieces": [{
            "id": p.id, "edges": p.edges, "vertices": p.vertices,
            "boundary": p.boundary, "parent": p.parent,
            "children": list(p.children), "depth": p.depth,
            "holes": [{"walk": h.walk,
                       "boundary": [int(b) for b in h.boundary]}
                      for h in p.holes],
        } for p in t.pieces],
    }


def _tree_from(st: dict, g: PlaneGraph) -> DecompositionTree:
    pieces = [Piece(id=p["id"], edges=p["edges"], vertices=p["vertices"],
                    boundary=p["boundary"],
                    holes=[Hole(walk=h["walk"], boundary=h["boundary"])
                           for h in p["holes"]],
                    parent=p["parent"], children=p["children"],
                    depth=p["depth"])
              for p in st["pieces"]]
    return DecompositionTree(g=g, pieces=pieces,
                             leaf_edge_count=st["leaf_edge_count"],
                             c_b_observed=st["c_b_observed"])


def _div_state(d: RDivision) -> dict:
    return {"r": d.r, "piece_ids": list(d.piece_ids),
            "canonical_piece": d.canonical_piece,
            "piece_of_edge": d.piece_of_edge}


def _div_from(st: dict, tree: DecompositionTree) -> RDivision:
    return RDivision(tree=tree, r=st["r"], piece_ids=st["piece_ids"],
                     canonical_piece=st["canonical_piece"],
                     piece_of_edge=st["piece_of_edge"])


# ---------------------------------------------------------------------------
# Oracles

def _linear_state(o: _olin.LinearOracle) -> dict:
    return {
        "p": o.p,
        "tree": _tree_state(o.tree),
        "view": [[int(pid) for pid in cut] for cut in o.view],
        "matrices": {int(pid): {"boundary": pm.boundary, "mat": pm.mat}
                     for pid, pm in o.ddg.matrices.items()},
    }


def _linear_from(st: dict, ng: NormalizedGraph) -> _olin.LinearOracle:
    tree = _tree_from(st["tree"], ng.graph)
    matrices = {pid: _ddg.PieceMatrix(piece_id=pid, boundary=m["boundary"],
                                      mat=m["mat"])
                for pid, m in st["matrices"].items()}
    entries = sum(pm.mat.size for pm in matrices.values())
    dg = _ddg.DenseDistanceGraph(tree=tree, matrices=matrices,
                                 entries=entries)
    return _olin.LinearOracle(ng=ng, p=st["p"], tree=tree, view=st["view"],
                              ddg=dg, index=_ddg.LevelIndex(tree, st["view"]))


def _parts_state(o) -> dict:
    return {
        "part_i": {int(pid): {"boundary": p.boundary, "vtx": p.vtx,
                              "bto": p.bto, "bfrom": p.bfrom}
                   for pid, p in o.part_i.items()},
        "part_ii": {int(nid): {"sep": p.sep, "vtx": p.vtx,
                               "dto": p.dto, "dfrom": p.dfrom}
                    for nid, p in o.part_ii.items()},
    }


def _parts_from(st: dict):
    part_i = {pid: _ofp.PartI(**p) for pid, p in st["part_i"].items()}
    part_ii = {nid: _ofp.PartIINode(**p) for nid, p in st["part_ii"].items()}
    return part_i, part_ii


def _fastprep_state(o: _ofp.FastPrepOracle) -> dict:
    st = _parts_state(o)
    st.update({
        "r": o.r,
        "tree": _tree_state(o.tree),
        "div": _div_state(o.div),
        "part_iii": {(int(pid), int(hi)): {"x": p.x, "cols": p.cols,
                                           "mat": p.mat}
                     for (pid, hi), p in o.part_iii.items()},
    })
    return st


def _fastprep_from(st: dict, ng: NormalizedGraph) -> _ofp.FastPrepOracle:
    tree = _tree_from(st["tree"], ng.graph)
    part_i, part_ii = _parts_from(st)
    part_iii = {key: _ofp.PartIIIHole(**p)
                for key, p in st["part_iii"].items()}
    return _ofp.FastPrepOracle(ng=ng, r=st["r"], tree=tree,
                               div=_div_from(st["div"], tree),
                               part_i=part_i, part_ii=part_ii,
                               part_iii=part_iii)


_CTX_FIELDS = ["h", "h2", "x", "y", "dj", "ell", "split", "falling",
               "inverse", "dense"]


def _fastquery_state(o: _ofq.FastQueryOracle) -> dict:
    st = _parts_state(o)
    st.update({
        "r": o.r,
        "tree": _tree_state(o.tree),
        "div": _div_state(o.div),
        "contexts": {(int(b), int(b2)): {f: getattr(c, f)
                                         for f in _CTX_FIELDS}
                     for (b, b2), c in o.contexts.items()},
    })
    return st


def _fastquery_from(st: dict, ng: NormalizedGraph) -> _ofq.FastQueryOracle:
    tree = _tree_from(st["tree"], ng.graph)
    part_i, part_ii = _parts_from(st)
    contexts = {(b, b2): _ofq.HolePairContext(b_id=b, b2_id=b2, **c)
                for (b, b2), c in st["contexts"].items()}
    return _ofq.FastQueryOracle(ng=ng, r=st["r"], tree=tree,
                                div=_div_from(st["div"], tree),
                                part_i=part_i, part_ii=part_ii,
                                contexts=contexts)


_KINDS = {
    _olin.LinearOracle: ("linear", _linear_state),
    _ofp.FastPrepOracle: ("fastprep", _fastprep_state),
    _ofq.FastQueryOracle: ("fastquery", _fastquery_state),
}
_LOADERS = {"linear": _linear_from, "fastprep": _fastprep_from,
            "fastquery": _fastquery_from}


def oracle_bytes(oracle) -> bytes:
    """The oracle serialized to its file image."""
    try:
        kind, to_state = _KINDS[type(oracle)]
    except KeyError:
        raise FormatError(f"not an oracle: {type(oracle).__name__}") from None
    return _pack(ORACLE_MAGIC, {"kind": kind, "ng": _ng_state(oracle.ng),
                                "state": to_state(oracle)})


def save_oracle(path, oracle) -> None:
    with open(path, "wb") as f:
        f.write(oracle_bytes(oracle))


def load_oracle(path):
    with open(path, "rb") as f:
        top = _unpack(f.read(), ORACLE_MAGIC)
    kind = top.get("kind")
    if kind not in _LOADERS:
        raise FormatError(f"unknown oracle kind {kind!r}")
    return _LOADERS[kind](top["state"], _ng_from(top["ng"]))
