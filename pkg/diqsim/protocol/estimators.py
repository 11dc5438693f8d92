"""CHSH estimation and abort decisions."""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from diqsim.errors import IncompleteStatisticsError, ParameterError
from diqsim.protocol.rounds import ChshRoles, InputPair, RoundTable
from diqsim.utils.logger import get_logger

logger = get_logger(__name__)

# Signs of <A_i B_j> in S = E00 + E01 + E10 - E11
CHSH_SIGNS: dict[InputPair, int] = {(0, 0): 1, (0, 1): 1, (1, 0): 1, (1, 1): -1}


class AbortDecision(str, Enum):
    """Outcome of an abort check."""

    PROCEED = "proceed"
    ABORT = "abort"


@dataclass(frozen=True)
class ChshEstimate:
    """Estimated CHSH value.

    Attributes:
        s_value: E00 + E01 + E10 - E11 over the designated pairs.
        correlator_values: (x, y) -> sample mean of a*b.
        counts: (x, y) -> number of rounds.
    """

    s_value: float
    correlator_values: dict[InputPair, float]
    counts: dict[InputPair, int]

    @property
    def violates_local_bound(self) -> bool:
        return self.s_value > 2.0


def estimate_correlators(
    test_rounds: RoundTable,
) -> tuple[dict[InputPair, float], dict[InputPair, int]]:
    """Sample mean of a*b for every observed input pair.

    Args:
        test_rounds: Test rounds only.

    Returns:
        Tuple (correlators, counts) keyed by (x, y).

    Raises:
        ParameterError: If a key round is present.
    """
    if test_rounds.is_key.any():
        raise ParameterError("CHSH estimation expects test rounds only")
    if not len(test_rounds):
        return {}, {}

    pairs, inverse = np.unique(
        np.stack([test_rounds.x, test_rounds.y], axis=1), axis=0, return_inverse=True
    )
    inverse = inverse.reshape(-1)
    products = test_rounds.a.astype(np.int64) * test_rounds.b.astype(np.int64)
    sums = np.bincount(inverse, weights=products, minlength=len(pairs))
    counts = np.bincount(inverse, minlength=len(pairs))

    correlators: dict[InputPair, float] = {}
    count_map: dict[InputPair, int] = {}
    for (x, y), total, count in zip(pairs.tolist(), sums.tolist(), counts.tolist()):
        correlators[(x, y)] = total / count
        count_map[(x, y)] = int(count)
    return correlators, count_map


def estimate_chsh(test_rounds: RoundTable, roles: ChshRoles = ChshRoles()) -> ChshEstimate:
    """Estimate the CHSH value from test rounds.

    Args:
        test_rounds: Test rounds only.
        roles: Inputs playing A0, A1, B0, B1.

    Returns:
        ChshEstimate.

    Raises:
        IncompleteStatisticsError: If a designated pair has no rounds.
    """
    correlators, counts = estimate_correlators(test_rounds)
    designated = roles.designated_pairs()

    missing = [pair for pair in designated.values() if counts.get(pair, 0) == 0]
    if missing:
        raise IncompleteStatisticsError(
            f"no rounds for designated CHSH pairs {sorted(missing)}; S is undefined"
        )

    s_value = sum(CHSH_SIGNS[role] * correlators[pair] for role, pair in designated.items())
    return ChshEstimate(s_value=float(s_value), correlator_values=correlators, counts=counts)


def abort_check(est: ChshEstimate, threshold: float = 2.0) -> AbortDecision:
    """Abort iff S does not exceed the threshold (S <= 2 by default)."""
    return AbortDecision.ABORT if est.s_value <= threshold else AbortDecision.PROCEED


def qber_abort_check(qber: float, threshold: float = 0.082) -> AbortDecision:
    """Abort iff the QBER exceeds the critical threshold."""
    return AbortDecision.ABORT if qber > threshold else AbortDecision.PROCEED
