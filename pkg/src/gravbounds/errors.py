class GravBoundsError(Exception):
    """Base class for toolkit errors."""


class DomainError(GravBoundsError, ValueError):
    """An input lies outside the operation's domain."""


class NumericError(GravBoundsError, ArithmeticError):
    """A numerical procedure failed to reach its tolerance."""


class TruncationError(NumericError):
    """A spectral expansion lost more mass than the configured tolerance.

    ``required_modes`` is an estimate of the basis size that would suffice.
    """

    def __init__(self, message, tail_mass=None, required_modes=None):
        super().__init__(message)
        self.tail_mass = tail_mass
        self.required_modes = required_modes
