"""Reconciliation quality measures."""

from diqsim.bits import BitString
from diqsim.errors import ParameterError, UndefinedRatioError
from diqsim.postprocessing.keyrate import binary_entropy
from diqsim.reconciliation.transcript import CascadeTranscript


def remaining_error_ratio(
    alice: BitString, bob_after: BitString, initial_error_count: int
) -> float:
    """Current Hamming distance over the initial error count (r/e).

    Raises:
        UndefinedRatioError: If initial_error_count < 1.
    """
    if initial_error_count < 1:
        raise UndefinedRatioError("remaining-error ratio is undefined without initial errors")
    return alice.hamming(bob_after) / initial_error_count


def leakage_efficiency(transcript: CascadeTranscript, n: int, q: float) -> float:
    """Reconciliation efficiency f = leaked_bits / (n * h(q)).

    Args:
        transcript: Session transcript.
        n: String length (>= 1).
        q: True error rate, strictly inside (0, 0.5).

    Raises:
        ParameterError: If q or n is out of range.
    """
    if not 0.0 < q < 0.5:
        raise ParameterError(f"q must lie in (0, 0.5), got {q}")
    if n < 1:
        raise ParameterError(f"n must be positive, got {n}")
    return transcript.leaked_bits / (n * binary_entropy(q))
