"""Key sifting and QBER estimation.

Outcomes map to key bits by +1 -> 1 and -1 -> 0 for both parties.
"""

from dataclasses import dataclass

import numpy as np

from diqsim.bits import BitString
from diqsim.errors import ParameterError, UndefinedQBERError
from diqsim.protocol.rounds import RoundTable


@dataclass(frozen=True)
class SiftedKeys:
    """Raw keys of both parties.

    Attributes:
        alice_bits: Alice's sifted key.
        bob_bits: Bob's sifted key.
        source_round_indices: Round number each bit came from, strictly increasing.
    """

    alice_bits: BitString
    bob_bits: BitString
    source_round_indices: tuple[int, ...]

    def __post_init__(self):
        if not len(self.alice_bits) == len(self.bob_bits) == len(self.source_round_indices):
            raise ParameterError("sifted keys and provenance differ in length")

    def __len__(self) -> int:
        return len(self.alice_bits)


def outcomes_to_bits(outcomes: np.ndarray) -> BitString:
    """+1 -> 1, -1 -> 0."""
    return BitString((np.asarray(outcomes) == 1).astype(np.uint8))


def sift_keys(key_rounds: RoundTable) -> SiftedKeys:
    """Turn key rounds into raw key bits, preserving round order.

    Args:
        key_rounds: Key rounds only.

    Returns:
        SiftedKeys (empty when there are no key rounds).

    Raises:
        ParameterError: If a test round is present.
    """
    if (~key_rounds.is_key).any():
        raise ParameterError("sifting expects key rounds only")
    order = np.argsort(key_rounds.index, kind="stable")
    return SiftedKeys(
        alice_bits=outcomes_to_bits(key_rounds.a[order]),
        bob_bits=outcomes_to_bits(key_rounds.b[order]),
        source_round_indices=tuple(int(i) for i in key_rounds.index[order]),
    )


def estimate_qber(keys: SiftedKeys) -> float:
    """Fraction of positions where the sifted keys differ.

    Raises:
        UndefinedQBERError: If the keys are empty.
    """
    if not len(keys):
        raise UndefinedQBERError("QBER is undefined for empty sifted keys")
    return keys.alice_bits.hamming(keys.bob_bits) / len(keys)


def mismatch_rounds(keys: SiftedKeys) -> list[int]:
    """Round numbers whose key bits disagree."""
    return [keys.source_round_indices[p] for p in keys.alice_bits.diff_positions(keys.bob_bits)]
