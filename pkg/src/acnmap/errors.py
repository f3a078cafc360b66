"""Exception classes shared across the mapping toolchain."""


class AcnMapError(Exception):
    """Base class for all toolchain errors."""


class AllZeroWeights(AcnMapError):
    """Every weight is zero and the bias is zero: there is no comparator
    condition to preserve, so no capacitance assignment exists."""


class WeightNormExceedsVmax(AcnMapError):
    """A per-tree weight total exceeds the peak supply voltage, making the
    ReLU-mapping ballast capacitors negative (unrealizable)."""


class DimensionMismatch(AcnMapError):
    """Input bit vector length does not match the neuron width."""


class TooLargeForExhaustive(AcnMapError):
    """Exhaustive input enumeration requested beyond the 2**24 guardrail."""


class NotUnitQuantized(AcnMapError):
    """A capacitance is not an integer multiple of the requested unit tile."""


class ParseError(AcnMapError):
    """Malformed interchange file (bad JSON or missing required fields)."""


class SchemaVersionError(AcnMapError):
    """Interchange file declares an unsupported format or version."""


class InvariantViolation(AcnMapError):
    """Data fails a structural invariant (e.g. a binary-tagged weight that
    is not +/-1, or a negative capacitance)."""


class SchemaMismatch(AcnMapError):
    """Network shape is not evaluable: expected one binary-activation
    hidden layer followed by one linear output layer."""
