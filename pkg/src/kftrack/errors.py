"""Exception hierarchy shared by the kernel, filter, localizer and simulator."""


class KFError(Exception):
    """Base class for every error raised by this package."""


class ShapeError(KFError, ValueError):
    """Operands have incompatible dimensions."""


class NonFiniteError(KFError, ArithmeticError):
    """An operation produced (or was given) NaN or Inf."""


class SingularMatrixError(KFError, ArithmeticError):
    """Pivot magnitude fell below the singularity threshold."""

    def __init__(self, column, pivot, context=None):
        self.column = column
        self.pivot = pivot
        msg = f"singular matrix: |pivot| = {abs(pivot):.3e} at column {column}"
        if context:
            msg = f"{context}: {msg}"
        super().__init__(msg)


class DomainError(KFError, ValueError):
    """Argument lies outside the mathematical domain of the operation."""


class ArityError(KFError, ValueError):
    """Too few inputs for a well-posed solve."""


class UnknownAnchorError(KFError, LookupError):
    pass


class AmbiguousObservationError(KFError, ValueError):
    pass


class SimulationError(KFError, RuntimeError):
    """A filter run failed; carries the step (and seed, for Monte Carlo runs)."""

    def __init__(self, message, step=None, seed=None):
        self.step = step
        self.seed = seed
        super().__init__(message)
