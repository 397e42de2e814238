"""Exception hierarchy.

Every error carries the name of the module that raised it so the command
line front end can report where a numerical failure happened.
"""


class HeunError(Exception):
    """Base class for all errors raised by this package."""

    module = "heun"


class InputError(HeunError, ValueError):
    """Invalid user input (bad parameters, malformed paths, ...)."""


class NumericalError(HeunError, ArithmeticError):
    """A computation could not reach the requested accuracy."""


# params
class DegenerateParams(InputError):
    module = "params"


# frobenius
class LogarithmicCase(InputError):
    module = "frobenius"


class OutsideDisc(InputError):
    module = "frobenius"


class NotConverged(NumericalError):
    module = "frobenius"


# continuation
class SingularityTooClose(NumericalError):
    module = "continuation"


class StepLimitExceeded(NumericalError):
    module = "continuation"


class DegenerateBasis(NumericalError):
    module = "continuation"


# connection
class MismatchedPoints(InputError):
    module = "connection"


class IllConditionedMatch(NumericalError):
    module = "connection"


# spectral
class DerivationInconsistent(NumericalError):
    module = "spectral"


class AsymptoticNotConverged(NumericalError):
    module = "spectral"


class NoRootsFound(NumericalError):
    module = "spectral"


# oracles
class PoleInC(InputError):
    module = "oracles"


class OutsideSeriesDomain(InputError):
    module = "oracles"


class AtSingularity(InputError):
    module = "oracles"


class OracleNotConverged(NumericalError):
    module = "oracles"
