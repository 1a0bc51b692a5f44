"""Exception types raised by the library.

The CLI maps :class:`PartialResultError` and :class:`DegenerateParametersError`
to exit code 2 (construction ran but could not meet its target) and every
other :class:`QidError` to exit code 1.
"""


class QidError(Exception):
    """Base class for all library errors."""


class InvalidDimensionError(QidError, ValueError):
    """Dimensions are zero, negative, or do not factor as required."""


class InvalidStateError(QidError, ValueError):
    """An operator fails the density-operator, effect or POVM contract."""


class IncompletePovmError(InvalidStateError):
    """POVM effects do not sum to the identity."""


class UnsupportedError(QidError, ValueError):
    """Requested strategy is not available for these parameters."""


class ResourceLimitError(QidError):
    """Operation would exceed the configured memory budget."""


class VacuousBoundError(QidError, ValueError):
    """A bound is requested outside the parameter range where it says anything."""


class UndefinedRateError(QidError, ValueError):
    """A rate is undefined for the given code size."""


class DegenerateParametersError(QidError, ValueError):
    """Parameter schedule collapses to a trivial (zero-size) construction."""


class PartialResultError(QidError):
    """A randomized construction exhausted its attempt budget.

    The best object built so far is available as ``result``.
    """

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result
