"""
Exception hierarchy shared by every yamabelab subpackage.

Each class carries the exit code the CLI uses when the error escapes a command:

    0  success
    1  invariant failure (a checked mathematical property did not hold)
    2  configuration error
    3  numerical non-convergence
"""

EXIT_OK = 0
EXIT_INVARIANT = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


class YamabeLabError(Exception):
    """Base class for all errors raised by yamabelab."""

    exit_code = EXIT_INVARIANT


class ConfigError(YamabeLabError):
    """Malformed or inconsistent run configuration."""

    exit_code = EXIT_CONFIG

    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        location = ""
        if path is not None:
            location = f"{path}:{line}: " if line is not None else f"{path}: "
        super().__init__(f"{location}{message}")


class ResolutionError(YamabeLabError):
    """The requested grid is too coarse for the operation."""

    exit_code = EXIT_CONFIG

    def __init__(self, message, period=None):
        self.period = period
        if period is not None:
            message = f"{message} (L={period:.10g})"
        super().__init__(message)


class DomainError(YamabeLabError, ValueError):
    """Argument outside the domain of a function."""


class InvalidRegimeError(DomainError):
    """Parameters violate the standing assumption n > 2s."""


class SingularityError(DomainError):
    """Evaluation at the kernel singularity t = 0."""


class ExtrapolationError(DomainError):
    """Evaluation outside the range a profile can represent."""


class InvariantViolation(YamabeLabError):
    """A property that must hold for the computation to be trusted failed."""


class CertificateInconsistencyError(InvariantViolation):
    """An oscillation certificate is inconsistent with the profile it certifies."""


class NumericalError(YamabeLabError):
    """Base class for non-convergence of an iterative or quadrature procedure."""

    exit_code = EXIT_NUMERICAL


class AccuracyError(NumericalError):
    """A series or quadrature did not reach its accuracy target."""

    def __init__(self, message, partial_value=None, error_bound=None):
        self.partial_value = partial_value
        self.error_bound = error_bound
        super().__init__(f"{message} (partial value {partial_value!r}, error bound {error_bound!r})")


class EigenSolverError(NumericalError):
    """Dense eigensolver failure; ``trace`` holds what was attempted."""

    def __init__(self, message, trace=None):
        self.trace = list(trace or [])
        super().__init__(message)


class CalibrationError(NumericalError):
    """Kernel normalization calibration spread exceeded its limit."""


class ContinuationStepError(NumericalError):
    """Newton diverged; the continuation step was too large."""

    def __init__(self, message, period=None):
        self.period = period
        if period is not None:
            message = f"{message} (L={period:.10g})"
        super().__init__(message)


class PositivityError(ContinuationStepError):
    """Newton iterate lost positivity even after step halving."""


class NoBifurcationError(NumericalError):
    """The periodic symbol never reaches the linearized potential."""
