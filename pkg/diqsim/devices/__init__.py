"""Black-box device statistics.

Includes:
- model: Correlators, noise channels and outcome sampling
- angles: Input-to-angle maps
"""

from diqsim.devices.angles import AngleMap
from diqsim.devices.model import (
    MeasurementSetting,
    NoiseModel,
    OutcomePair,
    Party,
    apply_bitflip,
    correlator,
    sample_outcome_pair,
    sample_outcomes,
)

__all__ = [
    "AngleMap",
    "MeasurementSetting",
    "NoiseModel",
    "OutcomePair",
    "Party",
    "apply_bitflip",
    "correlator",
    "sample_outcome_pair",
    "sample_outcomes",
]
