"""Exception types shared across the package.

Every error carries a stable ``code`` string; the CLI reports it verbatim in
its machine-readable error payload.
"""


class ConcordiaError(Exception):
    code = "ConcordiaError"


class NotDiagonalInBasis(ConcordiaError, ValueError):
    """State has off-diagonal mass in the proposed local basis."""

    code = "NotDiagonalInBasis"


class TranscriptMismatch(ConcordiaError):
    """Public gate sequence is inconsistent with the secret key."""

    code = "TranscriptMismatch"


class TooLarge(ConcordiaError, ValueError):
    """Dense computation refused above a size guard."""

    code = "TooLarge"


class NonUnitary(ConcordiaError, ValueError):
    code = "NonUnitary"


class MalformedInput(ConcordiaError, ValueError):
    code = "MalformedInput"
