"""Exception hierarchy shared by every module.

The CLI maps each class to a process exit code, so library callers and
shell scripts see the same classification of failures.
"""


class IwlambdaError(Exception):
    """Base class for all package errors."""


class InputError(IwlambdaError, ValueError):
    """Malformed or out-of-domain input (exit code 4)."""


class HypothesisError(IwlambdaError):
    """A theorem hypothesis is violated or unverified (exit code 2)."""


class UncertifiedError(IwlambdaError):
    """A result could not be certified at the working precision (exit code 3)."""


class BudgetError(UncertifiedError):
    """A configured size or time budget was exceeded."""
