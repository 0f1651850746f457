"""Exception types raised by posmaps."""


class PosmapsError(ValueError):
    """Base class for all input and precondition failures."""


class InvalidDimensionError(PosmapsError):
    pass


class DimensionMismatchError(PosmapsError):
    pass


class NotHermitianError(PosmapsError):
    pass


class ParameterError(PosmapsError):
    """A parameter lies outside its admissible range."""


class PreconditionError(PosmapsError):
    pass


class NotAContractionError(PreconditionError):
    """Raised when an affine map does not send the unit ball into itself.

    The offending ``ball_max`` value and its maximizing ``direction`` are
    kept on the exception so callers can report the certificate.
    """

    def __init__(self, message, ball_max=None, direction=None):
        super().__init__(message)
        self.ball_max = ball_max
        self.direction = direction


class InvalidWitnessError(PreconditionError):
    pass
