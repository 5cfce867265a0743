"""Command-line front end: graph generation, oracle build/load, batch
queries, verification against the brute-force oracle, and benchmark CSV.

All randomness comes from one generator seeded per invocation, so every
subcommand is deterministic for fixed arguments.
"""

from __future__ import annotations

import argparse
import csv
import sys
import time

import numpy as np

from . import oracle_fastprep, oracle_fastquery, oracle_linear, serialization
from .constants import INF
from .errors import PlanarOracleError
from .generators import generate
from .plane_graph import normalize
from .shortest_paths import dijkstra

_ORACLES = {
    "linear": (oracle_linear.build, oracle_linear.query),
    "fastprep": (oracle_fastprep.build, oracle_fastprep.query),
    "fastquery": (oracle_fastquery.build, oracle_fastquery.query),
}


def _touches(kind: str, oracle) -> int:
    return oracle.last_touched if kind == "linear" else oracle.last_touches


def _param_for(kind: str, n: int, args) -> int:
    """The oracle's size parameter from --p/--r/--space."""
    if args.space is not None:
        if kind == "linear":
            return oracle_linear.default_p(n)
        return oracle_fastprep.r_for_space(n, args.space)
    if kind == "linear":
        if args.p is None:
            raise SystemExit("--p (or --space) is required for --oracle linear")
        return args.p
    if args.r is None:
        raise SystemExit(f"--r (or --space) is required for --oracle {kind}")
    return args.r


def _build(kind: str, graph, param: int):
    build, _ = _ORACLES[kind]
    return build(normalize(graph), param)


def _read_pairs(path):
    pairs = []
    with open(path) as f:
        for line_no, line in enumerate(f, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 2:
                raise SystemExit(f"{path}:{line_no}: expected 'u v'")
            pairs.append((int(parts[0]), int(parts[1])))
    return pairs


def _cmd_gen(args):
    g = generate(args.kind, args.n, args.seed,
                 weight_range=(args.wmin, args.wmax))
    serialization.save_graph(args.output, g)
    print(f"wrote {args.output}: {args.kind} n={g.n} edges={g.n_edges}")
    return 0


def _cmd_build(args):
    g = serialization.load_graph(args.input)
    param = _param_for(args.oracle, g.n, args)
    t0 = time.perf_counter()
    o = _build(args.oracle, g, param)
    if args.oracle == "fastquery":
        oracle_fastquery.materialize_all_contexts(o)
    ms = 1000 * (time.perf_counter() - t0)
    serialization.save_oracle(args.output, o)
    print(f"wrote {args.output}: {args.oracle} param={param} "
          f"words={o.space_words} build_ms={ms:.0f}")
    return 0


def _cmd_query(args):
    o = serialization.load_oracle(args.input)
    if isinstance(o, oracle_linear.LinearOracle):
        q = oracle_linear.query
    elif isinstance(o, oracle_fastprep.FastPrepOracle):
        q = oracle_fastprep.query
    else:
        q = oracle_fastquery.query
    for u, v in _read_pairs(args.pairs):
        d = q(o, u, v)
        print("inf" if d >= INF else d)
    return 0


def _truth_rows(g):
    """Lazy per-source ground-truth distances."""
    cache = {}

    def row(u: int) -> np.ndarray:
        d = cache.get(u)
        if d is None:
            d = cache[u] = dijkstra(g, u).dist
        return d

    return row


def _cmd_verify(args):
    g = serialization.load_graph(args.input)
    param = _param_for(args.oracle, g.n, args)
    o = _build(args.oracle, g, param)
    _, q = _ORACLES[args.oracle]
    truth = _truth_rows(g)
    if args.all:
        pairs = ((u, v) for u in range(g.n) for v in range(g.n))
        total = g.n * g.n
    else:
        rng = np.random.default_rng(args.seed)
        pairs = ((int(rng.integers(g.n)), int(rng.integers(g.n)))
                 for _ in range(args.count))
        total = args.count
    bad = 0
    for u, v in pairs:
        got, want = q(o, u, v), int(truth(u)[v])
        if got != want:
            bad += 1
            if bad <= 10:
                print(f"MISMATCH u={u} v={v} got={got} want={want}",
                      file=sys.stderr)
    print(f"verify {args.oracle} param={param}: "
          f"{total - bad}/{total} pairs exact")
    return 1 if bad else 0


def _cmd_bench(args):
    g = serialization.load_graph(args.input)
    rng = np.random.default_rng(args.seed)
    qs = [(int(rng.integers(g.n)), int(rng.integers(g.n)))
          for _ in range(args.queries)]
    w = csv.writer(sys.stdout)
    w.writerow(["oracle", "n", "param", "build_ms", "bytes_stored",
                "mean_query_touches", "mean_query_us"])
    for kind in args.oracles.split(","):
        if kind not in _ORACLES:
            raise SystemExit(f"unknown oracle {kind!r}")
        param = _param_for(kind, g.n, args)
        t0 = time.perf_counter()
        o = _build(kind, g, param)
        _, q = _ORACLES[kind]
        build_ms = 1000 * (time.perf_counter() - t0)
        touches = 0
        t0 = time.perf_counter()
        for u, v in qs:
            q(o, u, v)
            touches += _touches(kind, o)
        us = 1e6 * (time.perf_counter() - t0) / max(1, len(qs))
        w.writerow([kind, g.n, param, f"{build_ms:.1f}", 8 * o.space_words,
                    f"{touches / max(1, len(qs)):.1f}", f"{us:.1f}"])
    return 0


def _add_param_flags(sp):
    sp.add_argument("--p", type=int, help="level count (linear oracle)")
    sp.add_argument("--r", type=int,
                    help="piece size (fastprep/fastquery oracles)")
    sp.add_argument("--space", type=int,
                    help="target word budget; derives the parameter")


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="ploracle",
        description="Exact distance oracles for directed planar graphs.")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("gen", help="generate a graph file")
    sp.add_argument("--kind", choices=["grid", "delaunay", "random"],
                    required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--seed", type=int, default=1)
    sp.add_argument("--wmin", type=int, default=1)
    sp.add_argument("--wmax", type=int, default=10)
    sp.add_argument("-o", "--output", required=True)
    sp.set_defaults(func=_cmd_gen)

    sp = sub.add_parser("build", help="build an oracle and save it")
    sp.add_argument("-i", "--input", required=True, help="graph file")
    sp.add_argument("--oracle", choices=sorted(_ORACLES), required=True)
    _add_param_flags(sp)
    sp.add_argument("-o", "--output", required=True)
    sp.set_defaults(func=_cmd_build)

    sp = sub.add_parser("query", help="answer pairs from a saved oracle")
    sp.add_argument("-i", "--input", required=True, help="oracle file")
    sp.add_argument("--pairs", required=True, help="file with 'u v' lines")
    sp.set_defaults(func=_cmd_query)

    sp = sub.add_parser("verify",
                        help="cross-check an oracle against Dijkstra")
    sp.add_argument("-i", "--input", required=True, help="graph file")
    sp.add_argument("--oracle", choices=sorted(_ORACLES), required=True)
    _add_param_flags(sp)
    sp.add_argument("--count", type=int, default=1000,
                    help="random pairs to check")
    sp.add_argument("--all", action="store_true",
                    help="check every ordered pair")
    sp.add_argument("--seed", type=int, default=1)
    sp.set_defaults(func=_cmd_verify)

    sp = sub.add_parser("bench", help="emit benchmark CSV to stdout")
    sp.add_argument("-i", "--input", required=True, help="graph file")
    sp.add_argument("--oracles", default="linear,fastprep,fastquery",
                    help="comma-separated oracle kinds")
    _add_param_flags(sp)
    sp.add_argument("--queries", type=int, default=200)
    sp.add_argument("--seed", type=int, default=1)
    sp.set_defaults(func=_cmd_bench)

    return ap


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        return args.func(args)
    except PlanarOracleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
