"""Error types raised by the library.

Each class corresponds to one named failure mode of the public API, so
callers (and the command line layer, which maps all of these to exit
code 2) can react without parsing messages.
"""


class WhitneyLabError(Exception):
    """Base class for all library errors."""


class InvalidRangeError(WhitneyLabError, ValueError):
    """An interval was given with its endpoints out of order."""


class InvalidScaleError(WhitneyLabError, ValueError):
    """A step or scale parameter that must be positive was not."""


class InvalidLengthError(WhitneyLabError, ValueError):
    """A normalized length parameter fell outside [0, 1]."""


class UnsupportedOrderError(WhitneyLabError, ValueError):
    """A difference order outside the supported even orders >= 2."""


class InvalidArgumentError(WhitneyLabError, ValueError):
    """Malformed argument shape (wrong side-list length and the like)."""


class DegenerateInputError(WhitneyLabError, ValueError):
    """Input collapses the requested computation (zero function, zero
    modulus with nonzero norm, spike forced onto a jump point, ...)."""


class RequiresGenericPointError(WhitneyLabError, ValueError):
    """An identity check was asked to evaluate through a jump or spike
    point where the two-parameter average is not continuous."""


class RequiresNonPoleError(WhitneyLabError, ValueError):
    """The factorization identity was evaluated at a pole of its
    rational prefactor (an integer in the symmetric node range)."""


class RequiresOscillationError(WhitneyLabError, ValueError):
    """An operation that is only meaningful for functions with zero mean
    on every grid interval was applied to one that is not."""


class InvalidGeometryError(WhitneyLabError, ValueError):
    """A search geometry violates its structural invariants."""


class FunctionFormatError(WhitneyLabError, ValueError):
    """A function file violates the interchange-format invariants.

    The message always carries the position (index or abscissa) of the
    offending entry.
    """


class SimplexStallError(WhitneyLabError, RuntimeError):
    """The simplex solver hit its iteration cap without terminating."""

    def __init__(self, iterations: int, phase: int):
        self.iterations = iterations
        self.phase = phase
        super().__init__(
            f"simplex stalled after {iterations} iterations in phase {phase}"
        )


class CertificationError(WhitneyLabError, RuntimeError):
    """A certified quantity violated a proven bound.

    This never indicates bad user input: it means the implementation
    contradicts established mathematics, so the offending state is
    attached for a bug report.
    """

    def __init__(self, message: str, report: dict):
        self.report = report
        super().__init__(message)
