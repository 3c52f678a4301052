"""Error taxonomy shared by the library, service, and CLI.

Exit-code / HTTP mapping: UsageError -> 1 / 400 "usage",
DataError -> 2 / 400 "data", InternalError -> 3 / 500 "internal".
"""


class FoldkitError(Exception):
    """Base class for all foldkit errors."""

    exit_code = 3
    http_status = 500
    code = "internal"


class UsageError(FoldkitError):
    """Invalid arguments or flag combinations supplied by the caller."""

    exit_code = 1
    http_status = 400
    code = "usage"


class DataError(FoldkitError):
    """Input data cannot be used: malformed CSV, degenerate labels, bad directives."""

    exit_code = 2
    http_status = 400
    code = "data"


class InternalError(FoldkitError):
    """A structural invariant was violated; indicates a bug, not bad input."""

    exit_code = 3
    http_status = 500
    code = "internal"
