"""Cascade reconciliation.

Alice's string is the reference and is never modified. Bob's copy is
corrected pass by pass: every block parity Alice sends is compared with
Bob's, mismatched blocks are searched with BINARY, and each correction
re-opens every already-disclosed block containing the flipped position
(the cascade effect). Those blocks are re-checked smallest first until all
disclosed parities agree again.
"""

import heapq
from typing import Optional, Sequence

import numpy as np

from diqsim.bits import BitString
from diqsim.errors import ParameterError, PlanError
from diqsim.reconciliation.binary import ParityOracle, binary_locate
from diqsim.reconciliation.schedule import PassPlan, block_schedule, make_pass_plans
from diqsim.reconciliation.transcript import (
    BinaryCall,
    CascadeTranscript,
    Correction,
    Direction,
    MessageKind,
    ParityMessage,
)
from diqsim.utils.logger import get_logger, log_cascade_event

logger = get_logger(__name__)

BlockRef = tuple[int, int]  # (0-based pass slot, block index)


class CascadeSession:
    """One interactive reconciliation session between Alice and Bob.

    Passes are run one at a time with run_pass(); result() returns Bob's
    corrected string and the transcript so far. A session is strictly
    sequential; separate sessions share nothing.

    Example:
        session = CascadeSession(alice, bob)
        for plan in plans:
            session.run_pass(plan)
        corrected, transcript = session.result()
    """

    def __init__(self, alice: BitString, bob: BitString):
        if len(alice) != len(bob):
            raise ParameterError(f"length mismatch: alice {len(alice)}, bob {len(bob)}")
        self._alice = alice
        self._bob = bob.bits.copy()
        self._oracle = ParityOracle(alice)
        self._initial_errors = alice.hamming(bob)

        self._plans: list[PassPlan] = []
        self._blocks: list[list[np.ndarray]] = []
        self._block_of: list[np.ndarray] = []
        self._alice_parity: list[np.ndarray] = []
        self._bob_parity: list[np.ndarray] = []
        self._disclosed: list[np.ndarray] = []

        self._messages: list[ParityMessage] = []
        self._corrections: list[Correction] = []
        self._binary_calls: list[BinaryCall] = []
        self._residual: list[int] = []

    @property
    def n(self) -> int:
        return len(self._alice)

    @property
    def passes_run(self) -> int:
        return len(self._plans)

    @property
    def leaked_bits(self) -> int:
        return self._oracle.disclosed

    @property
    def bob_bits(self) -> BitString:
        """Snapshot of Bob's current string."""
        return BitString(self._bob)

    def run_pass(self, plan: PassPlan) -> int:
        """Run the next pass.

        Args:
            plan: Plan whose pass_index is passes_run + 1 and whose length is n.

        Returns:
            Number of corrections made during the pass (including backtracking).

        Raises:
            PlanError: If the plan does not fit this session.
        """
        if plan.n != self.n:
            raise PlanError(f"plan covers {plan.n} positions, strings have {self.n}")
        if plan.pass_index != self.passes_run + 1:
            raise PlanError(f"expected pass {self.passes_run + 1}, got {plan.pass_index}")

        slot = len(self._plans)
        blocks = plan.blocks()
        self._plans.append(plan)
        self._blocks.append(blocks)
        self._block_of.append(plan.block_of())
        self._alice_parity.append(np.zeros(len(blocks), dtype=np.uint8))
        self._bob_parity.append(plan.block_parities(self._bob))
        self._disclosed.append(np.zeros(len(blocks), dtype=bool))

        before = len(self._corrections)
        for j, block in enumerate(blocks):
            parity = self._oracle.disclose(block)
            self._alice_parity[slot][j] = parity
            self._disclosed[slot][j] = True
            self._messages.append(
                ParityMessage(plan.pass_index, j, parity, Direction.ALICE_TO_BOB, MessageKind.BLOCK)
            )
            if parity != self._bob_parity[slot][j]:
                position = self._locate(slot, j)
                self._backtrack(position, exclude=(slot, j))

        residual = self._alice.hamming(BitString(self._bob))
        self._residual.append(residual)
        corrections = len(self._corrections) - before
        log_cascade_event(
            "cascade_pass_complete",
            plan.pass_index,
            block_size=plan.block_size,
            blocks=len(blocks),
            corrections=corrections,
            residual_errors=residual,
            leaked_bits=self.leaked_bits,
        )
        return corrections

    def unmatched_blocks(self) -> list[tuple[int, int]]:
        """(pass_index, block) pairs whose parities differ, recomputed from scratch."""
        bob = self._bob
        unmatched = []
        for plan in self._plans:
            diff = plan.block_parities(self._alice.bits) != plan.block_parities(bob)
            unmatched += [(plan.pass_index, int(j)) for j in np.flatnonzero(diff)]
        return unmatched

    def result(self) -> tuple[BitString, CascadeTranscript]:
        """Bob's corrected string and the transcript."""
        transcript = CascadeTranscript(
            parity_messages=tuple(self._messages),
            corrections=tuple(self._corrections),
            leaked_bits=self.leaked_bits,
            binary_calls=tuple(self._binary_calls),
            initial_errors=self._initial_errors,
            residual_errors=tuple(self._residual),
        )
        return BitString(self._bob), transcript

    def _locate(self, slot: int, block: int) -> int:
        """BINARY on one block, then flip the found position."""
        block_pass = self._plans[slot].pass_index

        def exchange(alice_parity: int, bob_parity: int) -> None:
            for parity, direction in (
                (alice_parity, Direction.ALICE_TO_BOB),
                (bob_parity, Direction.BOB_TO_ALICE),
            ):
                self._messages.append(
                    ParityMessage(block_pass, block, parity, direction, MessageKind.BINARY)
                )

        positions = self._blocks[slot][block]
        found = binary_locate(positions, self._oracle, self._bob, on_exchange=exchange)
        self._binary_calls.append(
            BinaryCall(self.passes_run, block_pass, block, int(positions.size), found.disclosed)
        )
        self._flip(found.position, block_pass)
        return found.position

    def _flip(self, position: int, block_pass: int) -> None:
        self._bob[position] ^= 1
        for owner, parities in zip(self._block_of, self._bob_parity):
            parities[owner[position]] ^= 1
        self._corrections.append(Correction(position, self.passes_run, block_pass))

    def _backtrack(self, position: int, exclude: BlockRef) -> None:
        """Re-check disclosed blocks holding flipped positions, smallest first.

        Ties go to the smaller pass index, then the smaller block index. Parities
        of disclosed blocks are already public, so the checks leak nothing.
        """
        heap: list[tuple[int, int, int]] = []
        queued: set[BlockRef] = set()

        def enqueue(pos: int, skip: BlockRef) -> None:
            for slot, owner in enumerate(self._block_of):
                ref = (slot, int(owner[pos]))
                if ref == skip or ref in queued or not self._disclosed[slot][ref[1]]:
                    continue
                queued.add(ref)
                heapq.heappush(heap, (int(self._blocks[slot][ref[1]].size), slot, ref[1]))

        enqueue(position, exclude)
        while heap:
            _, slot, block = heapq.heappop(heap)
            queued.discard((slot, block))
            if self._alice_parity[slot][block] != self._bob_parity[slot][block]:
                found = self._locate(slot, block)
                enqueue(found, (slot, block))


def run_cascade(
    alice: BitString, bob: BitString, plans: Sequence[PassPlan]
) -> tuple[BitString, CascadeTranscript]:
    """Reconcile Bob's string toward Alice's with the given pass plans.

    Args:
        alice: Reference string (never modified).
        bob: Bob's noisy copy.
        plans: Pass plans numbered 1..M, all of length len(alice).

    Returns:
        Tuple (corrected_bob, transcript).

    Raises:
        ParameterError: On a length mismatch between the strings.
        PlanError: On a malformed or misnumbered plan.
    """
    session = CascadeSession(alice, bob)
    for plan in plans:
        session.run_pass(plan)
    corrected, transcript = session.result()
    log_cascade_event(
        "cascade_finished",
        session.passes_run,
        n=len(alice),
        initial_errors=transcript.initial_errors,
        corrections=len(transcript.corrections),
        leaked_bits=transcript.leaked_bits,
    )
    return corrected, transcript


def reconcile(
    alice: BitString,
    bob: BitString,
    qber_estimate: float,
    passes: int,
    rng: np.random.Generator,
    block_sizes: Optional[Sequence[int]] = None,
) -> tuple[BitString, CascadeTranscript]:
    """Schedule, plan and run Cascade in one call.

    Args:
        alice: Reference string.
        bob: Bob's noisy copy.
        qber_estimate: Error-rate estimate feeding the block schedule.
        passes: Number of passes.
        rng: Generator for the pass shuffles.
        block_sizes: Explicit schedule overriding the one derived from qber_estimate.

    Returns:
        Tuple (corrected_bob, transcript). Empty strings come back unchanged
        with an empty transcript.
    """
    if len(alice) != len(bob):
        raise ParameterError(f"length mismatch: alice {len(alice)}, bob {len(bob)}")
    if not len(alice):
        return run_cascade(alice, bob, [])
    sizes = list(block_sizes) if block_sizes is not None else block_schedule(
        qber_estimate, len(alice), passes
    )
    return run_cascade(alice, bob, make_pass_plans(sizes, len(alice), rng))
