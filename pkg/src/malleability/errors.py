"""Exception hierarchy shared by all modules.

The CLI maps these onto exit codes: domain errors exit 2, resource errors 3,
reduction failures 4.
"""


class MalleabilityError(Exception):
    """Base class for every error raised by this package."""


class DomainError(MalleabilityError, ValueError):
    """An input lies outside the operation's domain."""


class ResourceError(MalleabilityError, RuntimeError):
    """A budget, attempt limit or sieve limit was exhausted."""


class ProtocolViolation(MalleabilityError):
    """The oracle returned a response that breaks its contract."""


class ReductionFailed(MalleabilityError):
    """A reduction run ended without a nontrivial divisor.

    The partial transcript is kept on the exception so callers can aggregate
    failure statistics.
    """

    def __init__(self, message, transcript=(), m_used=None):
        super().__init__(message)
        self.transcript = list(transcript)
        self.m_used = m_used


class ParticularCaseInapplicable(ReductionFailed):
    """The oracle answered bottom for the base-2 probe."""


class BoundViolation(MalleabilityError, AssertionError):
    """An empirical check of an analytic bound failed."""
