"""Exception hierarchy for diqsim.

Parameter-style errors also derive from ValueError so callers that only
care about bad input can catch the builtin.
"""

from typing import Optional


class DiqsimError(Exception):
    """Base class for all simulator errors."""


class ConfigurationError(DiqsimError, ValueError):
    """Invalid or unreadable configuration."""


class ParameterError(DiqsimError, ValueError):
    """An operation was called with arguments outside its domain."""


class ClassificationError(DiqsimError, ValueError):
    """A round's input pair is neither a test pair nor a key pair."""


class IncompleteStatisticsError(DiqsimError, ValueError):
    """A designated CHSH input pair has no observed rounds."""


class UndefinedQBERError(DiqsimError, ValueError):
    """QBER requested on empty sifted keys."""


class UndefinedRatioError(DiqsimError, ValueError):
    """Remaining-error ratio requested with zero initial errors."""


class PlanError(DiqsimError, ValueError):
    """A Cascade pass plan is malformed."""


class UsageError(DiqsimError):
    """Bad command-line usage."""


class ContractViolationError(DiqsimError, RuntimeError):
    """An internal protocol precondition was broken."""


class ProtocolAbort(DiqsimError):
    """The protocol aborted (insufficient Bell violation or QBER too high).

    Attributes:
        reason: Short machine-readable reason.
        s_value: Observed CHSH value, if known.
    """

    def __init__(self, reason: str, s_value: Optional[float] = None):
        self.reason = reason
        self.s_value = s_value
        message = reason if s_value is None else f"{reason} (S={s_value:.4f})"
        super().__init__(message)
