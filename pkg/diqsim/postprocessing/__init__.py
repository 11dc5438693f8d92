"""Key verification, privacy amplification and key-rate computation."""

from diqsim.postprocessing.hashing import (
    HashFamily,
    HashSpec,
    VerificationResult,
    privacy_amplify,
    universal_hash,
    verify_keys,
)
from diqsim.postprocessing.keyrate import (
    KeyRateReport,
    binary_entropy,
    eve_information,
    isotropic_chsh,
    key_rate,
    secure_length,
)

__all__ = [
    "HashFamily",
    "HashSpec",
    "KeyRateReport",
    "VerificationResult",
    "binary_entropy",
    "eve_information",
    "isotropic_chsh",
    "key_rate",
    "privacy_amplify",
    "secure_length",
    "universal_hash",
    "verify_keys",
]
