"""Exception taxonomy shared by all chfkit modules.

Every failure mode raised by the package derives from ChfkitError so that
callers (and the CLI) can separate toolkit failures from programming errors.
"""


class ChfkitError(Exception):
    """Base class for all chfkit errors."""


# property backend
class OutOfRange(ChfkitError):
    """Query outside the supported property band; extrapolation refused."""


class PropertyError(ChfkitError):
    """Water-property evaluation failed for a channel computation."""


# dataset I/O
class DatasetSyntaxError(ChfkitError):
    """Malformed XML; carries the underlying line/column information."""


class SchemaError(ChfkitError):
    """Unknown or missing mandatory element, or wrong list cardinality."""


class UnitError(ChfkitError):
    """Element payload is not numeric where a number is required."""


class InvariantError(ChfkitError):
    """A TestCase violates its type invariants (writer refuses to emit)."""


# channel
class MeshError(ChfkitError):
    """Degenerate axial mesh (non-positive spacing)."""


# correlations
class UnknownCorrelation(ChfkitError):
    """Correlation id not in the registry."""


# lookup-table engine
class FormatError(ChfkitError):
    """File does not follow the documented layout."""


class GridError(ChfkitError):
    """Lookup-table grid is non-monotone or has missing/duplicate cells."""


class OutOfTable(ChfkitError):
    """Query outside the lookup-table bounding box; no extrapolation."""


class SingularProfile(ChfkitError):
    """Axial correction factor requested where the local flux is zero."""


class NoConvergence(ChfkitError):
    """Iterative search exhausted its iteration budget."""


# digitizer / interpolation
class TooFewPoints(ChfkitError):
    """Curve has (or would be left with) fewer points than required."""


class OutOfSpan(ChfkitError):
    """Interpolation query outside the node span."""


class UnsortedNodes(ChfkitError):
    """Interpolation nodes are not strictly increasing."""


class SpanError(ChfkitError):
    """Digitized curve covers too little of the heated length."""


# neural network
class ShapeError(ChfkitError):
    """Feature batch has the wrong width."""


class NonFiniteInput(ChfkitError):
    """NaN or infinity in a feature batch."""


class EmptyDataset(ChfkitError):
    """Training requested on an empty dataset."""


class DivergenceError(ChfkitError):
    """Training loss became non-finite."""


class VersionError(ChfkitError):
    """Model file declares an unsupported format version."""


# evaluation harness
class EmptyInput(ChfkitError):
    """Metric requested over zero pairs."""


class NonPositiveMeasured(ChfkitError):
    """A measured value is zero or negative; relative error undefined."""


class UnknownModel(ChfkitError):
    """Predictor id not in the registry."""


# report writing failures map onto the platform I/O error
IoError = OSError
