"""BINARY: bisection search for one differing position in a block."""

from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Union

import numpy as np

from diqsim.bits import BitString
from diqsim.errors import ContractViolationError


class ParityOracle:
    """Alice's side of the parity exchange.

    Every call to disclose() is one parity bit sent over the public channel
    and counts toward leakage. peek() reads a parity that is already public
    (or is a simulation-side check) and is not counted.

    Attributes:
        disclosed: Number of parities disclosed so far.
    """

    def __init__(self, bits: Union[BitString, np.ndarray]):
        self._bits = bits.bits if isinstance(bits, BitString) else np.asarray(bits, dtype=np.uint8)
        self.disclosed = 0

    def disclose(self, positions: np.ndarray) -> int:
        """Send the parity of Alice's bits at positions."""
        self.disclosed += 1
        return self.peek(positions)

    def peek(self, positions: np.ndarray) -> int:
        """Parity without counting a disclosure."""
        return int(self._bits[positions].sum() & 1)


@dataclass(frozen=True)
class BinaryResult:
    """Outcome of one BINARY search.

    Attributes:
        position: A position where the strings differ.
        disclosed: Alice parities disclosed by the search.
    """

    position: int
    disclosed: int


def binary_locate(
    block_positions: Sequence[int],
    alice_parity_oracle: ParityOracle,
    bob_bits: Union[BitString, np.ndarray],
    on_exchange: Optional[Callable[[int, int], None]] = None,
) -> BinaryResult:
    """Locate one differing position in a parity-mismatched block.

    The block is padded at its end to the next power of two with virtual
    positions that read as zero on both sides. Each step halves the current
    range; Alice discloses the parity of the left half and the search
    descends into whichever half still mismatches. A block of size n
    therefore costs exactly ceil(log2 n) parities.

    Args:
        block_positions: Block positions in pass order.
        alice_parity_oracle: Alice's parity source.
        bob_bits: Bob's current bits.
        on_exchange: Called with (alice_parity, bob_parity) after every step.

    Returns:
        BinaryResult.

    Raises:
        ContractViolationError: If the block's parities already match.
    """
    positions = np.asarray(block_positions, dtype=np.int64)
    bob = bob_bits.bits if isinstance(bob_bits, BitString) else bob_bits

    if positions.size == 0 or alice_parity_oracle.peek(positions) == int(bob[positions].sum() & 1):
        raise ContractViolationError("BINARY called on a block whose parities match")

    start = alice_parity_oracle.disclosed
    lo, hi = 0, 1 << (int(positions.size) - 1).bit_length()
    while hi - lo > 1:
        mid = (lo + hi) // 2
        # padding sits at the end, so the left half always holds a real position
        left = positions[lo : min(mid, positions.size)]
        alice_parity = alice_parity_oracle.disclose(left)
        bob_parity = int(bob[left].sum() & 1)
        if on_exchange is not None:
            on_exchange(alice_parity, bob_parity)
        if alice_parity != bob_parity:
            hi = mid
        else:
            lo = mid

    return BinaryResult(
        position=int(positions[lo]), disclosed=alice_parity_oracle.disclosed - start
    )
