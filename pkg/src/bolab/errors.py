"""Error types shared across the package.

The exit-code contract of the command line layer maps PreconditionError to
status 2 (refusal) and quantitative failures to status 1.
"""


class PreconditionError(ValueError):
    """An operation was invoked outside its documented hypotheses."""


class ConventionError(ValueError):
    """A symbol or sign convention was violated (for example a Fourier
    multiplier that does not keep real fields real)."""


class ConstructionError(ValueError):
    """A build-time audit failed and the object was rejected."""


class BlowUpError(RuntimeError):
    """A time-stepping run left the representable range.

    Attributes
    ----------
    last_time : float
        Last time at which the state was still finite.
    """

    def __init__(self, message, last_time):
        super().__init__(message)
        self.last_time = last_time
