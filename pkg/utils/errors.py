from typing import Any, Optional, Tuple


class FracSplitError(Exception):
    """Base class for all solver errors."""


class ParameterError(FracSplitError, ValueError):
    """A parameter is outside its admissible range."""


class DataError(FracSplitError, ValueError):
    """Field or state data is malformed (non-finite values, wrong dimension)."""


class ConfigError(FracSplitError, ValueError):
    """A run document is invalid or references missing files."""


class AccuracyError(FracSplitError, ArithmeticError):
    """A quadrature did not reach the requested accuracy."""

    def __init__(self, message: str, estimate: float):
        super().__init__(f"{message} (achieved error estimate {estimate:.3e})")
        self.estimate = estimate


class BlowUpError(FracSplitError, ArithmeticError):
    """
    The nonlinear flow left every bounded set: a state component became
    non-finite or exceeded the blow-up threshold.

    Attributes:
        last_finite_time: Last time at which the whole state was finite and bounded
        index: Grid index of the offending point (None for a single state vector)
        step: Splitting step index, when raised from the driver
        trajectory: Partial trajectory, when raised from simulate
    """

    def __init__(
        self,
        message: str,
        last_finite_time: float,
        index: Optional[Tuple[int, ...]] = None,
        step: Optional[int] = None,
        trajectory: Any = None
    ):
        super().__init__(message)
        self.last_finite_time = last_finite_time
        self.index = index
        self.step = step
        self.trajectory = trajectory


class RegionViolationError(FracSplitError):
    """A trajectory left its configured invariant region and the audit is fatal."""

    def __init__(self, message: str, report: Any = None):
        super().__init__(message)
        self.report = report
