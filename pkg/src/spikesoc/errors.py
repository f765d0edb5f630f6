"""Exception types shared across the simulator."""


class SpikeSocError(Exception):
    """Base class for all simulator errors."""


class InvalidWeight(SpikeSocError):
    """A binary weight was outside {-1, +1}."""


class CorruptWeightWord(SpikeSocError):
    """Padding bits of a packed weight row were nonzero."""


class ModelImageError(SpikeSocError):
    """Base class for flash model image errors."""


class NotAModelImage(ModelImageError):
    """Leading bytes do not carry the model image magic."""


class UnsupportedVersion(ModelImageError):
    """Image declares a format version this build cannot read."""


class TruncatedImage(ModelImageError):
    """Image ends before the declared payload is complete."""


class CorruptImage(ModelImageError):
    """A header or layer field holds an invalid value."""


class InconsistentDims(SpikeSocError):
    """Consecutive layers do not chain output to input dimensions."""


class DimensionMismatch(SpikeSocError):
    """Input length does not match the expected dimension."""


class AccumulatorOverflow(SpikeSocError):
    """A membrane accumulator left the signed 32-bit range."""


class ProtocolViolation(SpikeSocError):
    """Controller command issued from an illegal state, or an unreadable command stream."""


class NotIdx(SpikeSocError):
    """File does not start with a recognized IDX magic."""


class CorruptDataset(SpikeSocError):
    """IDX payload is inconsistent with its declared dimensions."""


class OracleDivergence(SpikeSocError):
    """Event-driven result disagreed with the dense reference simulator."""
