"""Domain exception types shared across the package."""


class KrausSimError(ValueError):
    """Base class for all domain errors raised by kraussim."""


class NotHermitian(KrausSimError):
    """Matrix deviates from its conjugate transpose beyond tolerance."""


class NotPSD(KrausSimError):
    """Matrix has an eigenvalue below the negative tolerance."""


class OutsideBall(KrausSimError):
    """Bloch vector has norm greater than one."""


class WrongDim(KrausSimError):
    """Operand has a dimension other than the one required."""


class DimMismatch(KrausSimError):
    """Two operands that must share a dimension do not."""


class OutOfRange(KrausSimError):
    """Scalar parameter lies outside its admissible interval."""


class IncompleteKraus(KrausSimError):
    """Kraus set fails the completeness relation beyond tolerance."""


class NotTracePreserving(KrausSimError):
    """Signed decomposition fails the weighted completeness relation."""


class Unsatisfiable(KrausSimError):
    """No re-fit of the remaining weights can restore trace preservation."""


class NotCompilable(KrausSimError):
    """Operator matches none of the supported optical-element shapes."""


class FullyBlocked(KrausSimError):
    """Element sequence transmits (numerically) nothing of the input state."""


class DegenerateSystem(KrausSimError):
    """Measurement design does not determine the state (rank deficient)."""
