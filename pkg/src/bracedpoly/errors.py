"""Exception types.

Everything raised on purpose by the library derives from ``DomainError`` so
the command line front end can map it to exit code 1.
"""


class DomainError(ValueError):
    """Input is well formed but violates a mathematical precondition."""


class GraphError(DomainError):
    """Invalid braced polygon graph (bad labels, boundary pair as brace, ...)."""


class GraphMismatchError(DomainError):
    pass


class DegenerateConfigurationError(DomainError):
    """Coincident adjacent points, or points that do not span the plane."""


class NotConvexError(DomainError):
    pass


class NotConnectedError(DomainError):
    """Graph lacks the vertex connectivity an operation needs."""


class NotEquilibriumError(DomainError):
    pass


class NotAFlexError(DomainError):
    pass


class CongruentError(DomainError):
    pass


class SuperpositionError(DomainError):
    pass


class ConvergenceError(DomainError):
    """An iterative construction gave up; the message says which step failed."""
