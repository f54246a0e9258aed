"""Exception and warning classes.

Errors fall into three families that the CLI maps onto exit codes:
input errors (2), model-regime errors (3) and solver failures (4).
"""


class CritDebtError(Exception):
    """Base class for all package errors."""

    exit_code = 1


class InputError(CritDebtError, ValueError):
    exit_code = 2


class EmptyPortfolio(InputError):
    pass


class NonPositiveAmount(InputError):
    pass


class NonPositiveDuration(InputError):
    pass


class CSVParseError(InputError):
    def __init__(self, line, message):
        super().__init__(f"line {line}: {message}")
        self.line = line


class EmptyTrajectory(InputError):
    pass


class ModelRegimeError(CritDebtError):
    exit_code = 3


class DomainError(ModelRegimeError, ValueError):
    pass


class NonPositiveVelocity(ModelRegimeError):
    pass


class InfeasibleAggregates(ModelRegimeError):
    pass


class NoRoot(ModelRegimeError):
    pass


class SolverError(CritDebtError):
    exit_code = 4


class NoConvergence(SolverError):
    """Iteration budget exhausted; ``last`` holds the final iterate."""

    def __init__(self, message, max_iter=None, last=None):
        super().__init__(message)
        self.max_iter = max_iter
        self.last = last


class QuadratureFailure(SolverError):
    pass


class NumericalOverflow(SolverError):
    pass


class ModelWarning(UserWarning):
    """Base class for warnings the report collects verbatim."""


class RegimeViolation(ModelWarning):
    """B = b*sigma fell below 1, outside the asymptotic regime."""


class SmallK(ModelWarning):
    """Fewer than 10 debts; large-k formulas are unreliable."""


class LowDominance(ModelWarning):
    """Short-dominant approximation used with m < 10 n."""


class FrozenSystem(ModelWarning):
    """Bose occupation below tolerance; sigma is numerically zero."""
