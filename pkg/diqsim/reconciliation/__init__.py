"""Cascade information reconciliation."""

from diqsim.reconciliation.binary import BinaryResult, ParityOracle, binary_locate
from diqsim.reconciliation.cascade import CascadeSession, reconcile, run_cascade
from diqsim.reconciliation.metrics import leakage_efficiency, remaining_error_ratio
from diqsim.reconciliation.schedule import PassPlan, block_schedule, make_pass_plans
from diqsim.reconciliation.transcript import (
    BinaryCall,
    CascadeTranscript,
    Correction,
    Direction,
    MessageKind,
    ParityMessage,
)

__all__ = [
    "BinaryCall",
    "BinaryResult",
    "CascadeSession",
    "CascadeTranscript",
    "Correction",
    "Direction",
    "MessageKind",
    "ParityMessage",
    "ParityOracle",
    "PassPlan",
    "binary_locate",
    "block_schedule",
    "leakage_efficiency",
    "make_pass_plans",
    "reconcile",
    "remaining_error_ratio",
    "run_cascade",
]
