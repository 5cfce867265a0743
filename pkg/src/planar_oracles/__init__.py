"""Exact point-to-point distance oracles for directed planar graphs.

Three oracles trade preprocessing space against query time:

- :mod:`.oracle_linear` — near-linear space, Dijkstra over a dense distance
  graph at query time.
- :mod:`.oracle_fastprep` — O(n²/r + n√r)-word tables, O(√r·log r) queries.
- :mod:`.oracle_fastquery` — the same space shape with staircase
  matrix-searching queries touching O(|X|+|Y|) entries.

All distances are exact over non-negative integer edge lengths.
"""

from . import (
    ddg,
    decomposition,
    generators,
    monge,
    oracle_fastprep,
    oracle_fastquery,
    oracle_linear,
    plane_graph,
    serialization,
    shortest_paths,
)
from .constants import INF
from .errors import PlanarOracleError

__version__ = "0.1.0"

__all__ = ["INF", "PlanarOracleError", "plane_graph", "shortest_paths",
           "decomposition", "monge", "ddg", "generators", "oracle_linear",
           "oracle_fastprep", "oracle_fastquery", "serialization",
           "__version__"]
