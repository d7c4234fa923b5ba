"""Exception hierarchy shared by all cfsec modules."""


class CFSecError(Exception):
    """Base class for library errors."""


class InvalidArgumentError(CFSecError, ValueError):
    """Raised when inputs violate an operation's preconditions."""


class UnrecoverableError(CFSecError):
    """Raised when a user node cannot solve for the other codewords."""


class SearchError(CFSecError, RuntimeError):
    """Internal failure of the coefficient search (e.g. candidate cap hit)."""
