"""Exception hierarchy shared by the library, the service, and the CLI.

Exit-code / HTTP mapping: PreconditionError -> exit 1 / HTTP 422,
InternalCheckError and its subclasses -> exit 2 / HTTP 500.
"""


class NilvarietyError(Exception):
    """Base class for all package errors."""


class PreconditionError(NilvarietyError, ValueError):
    """An operation was called on input that violates its contract."""


class InternalCheckError(NilvarietyError, RuntimeError):
    """A postcondition that should hold on valid input failed; signals a bug."""


class SearchExhaustedError(InternalCheckError):
    """A randomized search (invertible conjugator, stratum resample) ran out
    of attempts.  Valid inputs make this overwhelmingly unlikely, so hitting
    it is reported as an internal failure rather than a negative answer."""
