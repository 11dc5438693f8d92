"""Cascade message transcript and leakage accounting."""

from dataclasses import dataclass
from enum import Enum
from typing import Iterator


class Direction(str, Enum):
    """Who sent a parity. Only Alice's parities count as leakage."""

    ALICE_TO_BOB = "alice->bob"
    BOB_TO_ALICE = "bob->alice"


class MessageKind(str, Enum):
    """Top-level block parity or a parity sent inside BINARY."""

    BLOCK = "block"
    BINARY = "binary"


@dataclass(frozen=True)
class ParityMessage:
    """One parity on the public channel.

    Attributes:
        pass_index: 1-based pass the block belongs to.
        block_index: 0-based block within that pass.
        parity: Parity bit.
        direction: Sender.
        kind: Block parity or BINARY sub-block parity.
    """

    pass_index: int
    block_index: int
    parity: int
    direction: Direction
    kind: MessageKind


@dataclass(frozen=True)
class Correction:
    """One flip of Bob's bit.

    Attributes:
        position: 0-based position flipped.
        pass_index: Pass in progress when the error was found.
        block_pass: Pass of the block BINARY ran on (smaller when backtracking).
    """

    position: int
    pass_index: int
    block_pass: int


@dataclass(frozen=True)
class BinaryCall:
    """Bookkeeping for one BINARY search."""

    pass_index: int
    block_pass: int
    block_index: int
    block_size: int
    disclosed: int


@dataclass(frozen=True)
class CascadeTranscript:
    """Everything exchanged during one reconciliation session.

    Attributes:
        parity_messages: Messages in send order.
        corrections: Flips in the order they happened.
        leaked_bits: Parities Alice disclosed.
        binary_calls: Every BINARY search.
        initial_errors: Hamming distance before the first pass.
        residual_errors: Hamming distance after each pass (simulation-side only).
    """

    parity_messages: tuple[ParityMessage, ...]
    corrections: tuple[Correction, ...]
    leaked_bits: int
    binary_calls: tuple[BinaryCall, ...]
    initial_errors: int
    residual_errors: tuple[int, ...]

    @property
    def passes(self) -> int:
        return len(self.residual_errors)

    @property
    def top_level_messages(self) -> int:
        """Number of block parities Alice sent."""
        return sum(
            1
            for m in self.parity_messages
            if m.kind is MessageKind.BLOCK and m.direction is Direction.ALICE_TO_BOB
        )

    @property
    def one_way_leakage(self) -> int:
        """Recount of Alice-to-Bob parities from the message list."""
        return sum(1 for m in self.parity_messages if m.direction is Direction.ALICE_TO_BOB)

    def residual_qber(self, n: int) -> list[float]:
        """Residual error rate after each pass."""
        return [r / n for r in self.residual_errors] if n else []

    def parity_rows(self) -> Iterator[tuple[int, int, str, int, str]]:
        """(pass, block, direction, parity, kind) per message."""
        for m in self.parity_messages:
            yield m.pass_index, m.block_index, m.direction.value, m.parity, m.kind.value

    def correction_rows(self) -> Iterator[tuple[int, int, int]]:
        """(pass, position, block_pass) per correction."""
        for c in self.corrections:
            yield c.pass_index, c.position, c.block_pass
