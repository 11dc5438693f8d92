"""Protocol engine: round loop, CHSH and QBER estimation, sifting.

Includes:
- rounds: Input distribution, round generation and classification
- estimators: CHSH estimation and abort checks
- sifting: Raw key extraction and QBER
"""

from diqsim.protocol.estimators import (
    AbortDecision,
    ChshEstimate,
    abort_check,
    estimate_chsh,
    estimate_correlators,
    qber_abort_check,
)
from diqsim.protocol.rounds import (
    ChshRoles,
    InputDistribution,
    ProtocolSetup,
    RoundRecord,
    RoundTable,
    RoundType,
    classify_rounds,
    run_rounds,
)
from diqsim.protocol.sifting import SiftedKeys, estimate_qber, mismatch_rounds, sift_keys

__all__ = [
    "AbortDecision",
    "ChshEstimate",
    "ChshRoles",
    "InputDistribution",
    "ProtocolSetup",
    "RoundRecord",
    "RoundTable",
    "RoundType",
    "SiftedKeys",
    "abort_check",
    "classify_rounds",
    "estimate_chsh",
    "estimate_correlators",
    "estimate_qber",
    "mismatch_rounds",
    "qber_abort_check",
    "run_rounds",
    "sift_keys",
]
