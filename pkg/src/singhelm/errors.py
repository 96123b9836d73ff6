"""Exception types shared by the evaluators."""


class DomainError(ValueError):
    """Arguments or parameters outside the region where an evaluator is valid."""


class ConvergenceError(ArithmeticError):
    """A series did not reach its tail tolerance within the configured limits."""
