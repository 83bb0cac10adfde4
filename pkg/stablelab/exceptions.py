"""Custom common exceptions."""

from typing import Any

from pydantic import ValidationError


class EvaluationError(Exception):
    """Exception raised when a field returns a non-finite value inside a stencil."""

    def __init__(self, message: str, point: Any = None):
        """Initialize EvaluationError with a message and the offending point."""
        self.message = message
        self.point = point
        super().__init__(self.message)


class DegenerateGradientError(Exception):
    """Exception raised when a level set normal is undefined at the queried point."""

    def __init__(self, point: Any, gradient_norm: float):
        """Initialize DegenerateGradientError naming the point and |grad u|."""
        self.point = point
        self.gradient_norm = gradient_norm
        self.message = (
            f"Degenerate gradient at point {point}: |grad u| = {gradient_norm:.3e}"
        )
        super().__init__(self.message)


class IntegrationError(Exception):
    """Exception raised when an ODE integration cannot proceed."""

    def __init__(self, message: str, last_state: Any = None, trajectory: Any = None):
        """Initialize IntegrationError with the last accepted state."""
        self.message = message
        self.last_state = last_state
        self.trajectory = trajectory
        super().__init__(self.message)


class DomainError(Exception):
    """Exception raised when an operation receives an invalid domain."""

    def __init__(self, message: str):
        """Initialize DomainError with a specific error message."""
        self.message = message
        super().__init__(self.message)


class ConvergenceError(Exception):
    """Exception raised when an iterative solver exhausts its budget."""

    def __init__(self, message: str, last_value: float | None = None, history=None):
        """Initialize ConvergenceError with the last iterate diagnostics."""
        self.message = message
        self.last_value = last_value
        self.history = history if history is not None else []
        super().__init__(self.message)


class ConsistencyError(Exception):
    """Exception raised when two independent evaluations of a quantity disagree."""

    def __init__(self, message: str):
        """Initialize ConsistencyError with a specific error message."""
        self.message = message
        super().__init__(self.message)


class SolverError(Exception):
    """Exception raised when a discrete linear system cannot be solved."""

    def __init__(self, message: str):
        """Initialize SolverError with a specific error message."""
        self.message = message
        super().__init__(self.message)


class ConfigurationError(Exception):
    """Exception raised when an experiment configuration is invalid."""

    def __init__(self, message: str):
        """Initialize ConfigurationError with a specific error message."""
        self.message = message
        super().__init__(self.message)


class OutputError(Exception):
    """Exception raised when reports or artifacts cannot be written."""

    def __init__(self, path: Any, reason: str = ""):
        """Initialize OutputError with the offending path."""
        self.path = path
        self.message = f"Cannot write to '{path}'"
        if reason:
            self.message += f": {reason}"
        super().__init__(self.message)


EXIT_OK = 0
EXIT_FAILED_CHECK = 1
EXIT_BAD_CONFIGURATION = 2


def exit_code_for(exc: Exception) -> int | None:
    """Map an exception raised while running an experiment to a CLI exit code.

    Args:
        exc (Exception): The exception instance.

    Returns:
        int | None: The exit code, or None when the exception is not handled and must
            propagate.

    """
    if isinstance(exc, ConfigurationError | OutputError | ValidationError):
        return EXIT_BAD_CONFIGURATION
    return None
