"""Exception types shared across the library."""


class PlanarOracleError(Exception):
    """Base class for all library errors."""


class NonPlanarRotation(PlanarOracleError):
    """The rotation system violates Euler's identity."""


class DanglingDart(PlanarOracleError):
    """A dart is missing from, or duplicated in, a vertex rotation."""


class NegativeLength(PlanarOracleError):
    """An edge length is negative or exceeds the representable cap."""


class DuplicateEdge(PlanarOracleError):
    """Two darts describe the same ordered vertex pair."""


class Disconnected(PlanarOracleError):
    """The graph is not connected."""


class InactiveSource(PlanarOracleError):
    """Dijkstra source is not active under the edge filter."""


class TooLarge(PlanarOracleError):
    """Instance exceeds a configured size cap."""


class TooSmall(PlanarOracleError):
    """Piece is below the splitting threshold."""


class Unreachable(PlanarOracleError):
    """No path exists in the active subgraph."""


class VertexInPiece(PlanarOracleError):
    """Hole lookup called for a vertex that belongs to the piece."""


class SamePiece(PlanarOracleError):
    """Operation requires two distinct pieces."""


class UnknownVertex(PlanarOracleError):
    """Query vertex id is out of range or auxiliary."""


class BadParams(PlanarOracleError):
    """Invalid generator or build parameters."""


class FormatError(PlanarOracleError):
    """Malformed graph or oracle file."""
