# Copyright: (c) 2026, causal.zid contributors
# BSD 3-Clause License (see LICENSE or
# https://opensource.org/licenses/BSD-3-Clause)

"""Exception types raised by the causal.zid engine.

Every error carries a ``code`` naming the failure class so that the CLI and
the Ansible modules can report it without parsing messages.
"""


class ZidError(Exception):
    """Base class for all engine errors.

    Attributes:
        code (str): Failure class, e.g. ``CYCLE`` or ``MISSING_REGIME``.
    """

    code = "ERROR"

    def __init__(self, message, code=None):
        super().__init__(message)
        if code is not None:
            self.code = code

    def __str__(self):
        return "{0}: {1}".format(self.code, self.args[0] if self.args else "")


class GraphError(ZidError):
    """Invalid graph or graph operation (CYCLE, SELF_LOOP, UNKNOWN_VERTEX,
    DUPLICATE_EDGE, MALFORMED_WITNESS)."""


class SeparationError(ZidError):
    """Invalid separation or rule query (OVERLAPPING_SETS)."""

    code = "OVERLAPPING_SETS"


class EstimandError(ZidError):
    """Estimand is malformed or cannot be evaluated (MALFORMED_ESTIMAND,
    MISSING_REGIME, UNBOUND_VARIABLE, DOMAIN_MISMATCH)."""


class QueryError(ZidError):
    """Invalid identification request (INVALID_QUERY, MALFORMED_FAIL,
    SUBSET_LIMIT)."""

    code = "INVALID_QUERY"


class OracleError(ZidError):
    """Oracle model is too large or inconsistent (SIZE_LIMIT, DOMAIN_MISMATCH,
    MALFORMED_MODEL)."""

    code = "SIZE_LIMIT"


class InputError(ZidError):
    """Bad command-line or module input (FLAG_ERROR)."""

    code = "FLAG_ERROR"


class ParseError(InputError):
    """Graph text could not be parsed.

    Attributes:
        line (int): 1-based line number of the offending line.
        token (str): Offending token or the whole line.
    """

    code = "PARSE_ERROR"

    def __init__(self, message, line=None, token=None):
        super().__init__(message)
        self.line = line
        self.token = token

    def __str__(self):
        where = "line {0}: ".format(self.line) if self.line is not None else ""
        token = " (near {0!r})".format(self.token) if self.token else ""
        return "{0}: {1}{2}{3}".format(self.code, where, self.args[0], token)
