"""Exception types shared across the toolkit."""


class IonGateError(Exception):
    """Base class for all toolkit errors."""


class TruncationLeakage(IonGateError):
    """Population reached the top of a truncated Fock space."""

    def __init__(self, message, step=None, population=None):
        super().__init__(message)
        self.step = step
        self.population = population


class BasisMismatch(IonGateError, ValueError):
    pass


class NonHermitian(IonGateError, ValueError):
    pass


class DomainError(IonGateError, ValueError):
    pass


class NoConvergence(IonGateError, RuntimeError):
    pass


class IllConditioned(IonGateError, RuntimeError):
    """Overlap with the free-evolution reference is too small to define a phase."""


class DesignRejected(IonGateError, ValueError):
    pass


class IndexOutOfRange(IonGateError, IndexError):
    pass
