class BasisPursuitError(Exception):
    """Base class for errors raised by this package."""


class DimensionError(BasisPursuitError, ValueError):
    """Operand shapes do not agree (a caller bug)."""


class RankDeficiencyError(BasisPursuitError):
    """Fewer independent rows or columns than requested."""


class SingularMatrixError(BasisPursuitError):
    """Square system is singular to working tolerance."""


class ToleranceError(BasisPursuitError):
    """Numerical state is inconsistent with exact arithmetic, e.g. a span grew past its ambient dimension."""


class RankMismatchError(BasisPursuitError):
    """The supplied rank disagrees with the data.

    ``result`` carries the partial :class:`~basispursuit.rbp.ReconstructionResult`
    when one was produced.
    """

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result
