"""Exception hierarchy shared by every stage.

The CLI maps each class to an exit code; library code raises these and never
calls ``sys.exit`` itself.
"""


class LabError(Exception):
    """Base class for all errors raised by the laboratory."""

    exit_code = 1


class InvalidInputError(LabError, ValueError):
    """Bad parameters, grids, tables or configuration values."""

    exit_code = 1


class NumericalError(LabError):
    """A hard numerical guarantee could not be met."""

    exit_code = 2


class DivergenceError(NumericalError):
    """The requested improper integral does not exist (e.g. K_cos(0) of a non-integrable kernel)."""


class ModelInvalidError(LabError):
    """The model violates a standing assumption, e.g. K_cos(omega) <= 0."""

    exit_code = 3


class AssumptionError(LabError):
    """Assumption validation returned a fail verdict where a pass was required."""

    exit_code = 3
