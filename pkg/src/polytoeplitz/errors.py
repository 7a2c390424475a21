"""Exception types shared across the package."""


class PolytoeplitzError(Exception):
    """Base class for all errors raised by this package."""


class DimensionMismatch(PolytoeplitzError):
    """Operands live over different alphabets or have incompatible shapes."""


class NotComparable(PolytoeplitzError):
    """A pair of multi-words is not comparable under right divisibility."""


class TruncationError(PolytoeplitzError):
    """A word or index falls outside the configured truncation."""


class SpecError(PolytoeplitzError):
    """A polydomain specification is malformed or used outside its domain."""


class NumericalRankError(PolytoeplitzError):
    """An eigenvalue sits too close to the rank cutoff to classify safely."""
