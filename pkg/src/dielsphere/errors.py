"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class SingularityError(ValueError):
    """Evaluation requested on (or too close to) a singular set."""


class ConvergenceError(RuntimeError):
    """An iterative computation failed to reach the requested tolerance."""


class DiagnosticsError(RuntimeError):
    """A reference value needed for error reporting is itself unreliable."""
