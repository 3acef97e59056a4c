"""Exception taxonomy shared by all lagflow modules.

Mathematical precondition failures (``PreconditionError``) are kept apart
from malformed input (``InputError``) so the CLI can map them to distinct
exit codes.
"""


class LagflowError(Exception):
    """Base class for all lagflow errors."""


class PreconditionError(LagflowError):
    """A mathematical precondition of an operation is violated.

    The message names the violated precondition verbatim, e.g. "not clean",
    "degenerate endpoint", "not transversal".
    """


class InputError(LagflowError):
    """Malformed or inconsistent input data (shapes, encodings, flags)."""
