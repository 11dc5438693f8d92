"""Remaining-error ratio per Cascade pass across noise levels.

Each repetition measures the sifted-key QBER of one protocol run at the
noise level, injects i.i.d. errors at that rate into a fresh random string
and records r/e after every pass. Column 0 is the state before any pass.
"""

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from diqsim.bits import BitString
from diqsim.config import Settings
from diqsim.experiments.pipeline import measure_qber
from diqsim.reconciliation import (
    CascadeSession,
    block_schedule,
    make_pass_plans,
    remaining_error_ratio,
)
from diqsim.utils.seeding import Stream, derive_rng


@dataclass(frozen=True)
class HeatmapRow:
    """One noise level of the heatmap.

    Attributes:
        noise: Bit-flip probability of the measurement run.
        qber: Mean measured QBER used for error injection.
        ratios: Mean r/e for passes 0..passes, or None when no repetition had errors.
        reps: Repetitions contributing to the ratios.
    """

    noise: float
    qber: float
    ratios: Optional[tuple[float, ...]]
    reps: int

    @property
    def applicable(self) -> bool:
        return self.ratios is not None


def error_channel(
    length: int, qber: float, rng: np.random.Generator
) -> tuple[BitString, BitString]:
    """Random string and a copy with i.i.d. flips at rate qber."""
    alice = BitString.random(length, rng)
    flips = BitString((rng.random(length) < qber).astype(np.uint8))
    return alice, alice.xor(flips)


def ratio_trace(
    alice: BitString, bob: BitString, qber: float, passes: int, rng: np.random.Generator
) -> Optional[list[float]]:
    """r/e before and after each pass; None when the strings already agree."""
    errors = alice.hamming(bob)
    if not errors:
        return None
    sizes = block_schedule(min(qber, 0.5), len(alice), passes)
    session = CascadeSession(alice, bob)
    trace = [1.0]
    for plan in make_pass_plans(sizes, len(alice), rng):
        session.run_pass(plan)
        trace.append(remaining_error_ratio(alice, session.bob_bits, errors))
    return trace


def heatmap_cell(
    settings: Settings,
    root_seed: int,
    grid_index: int,
    repetition: int,
    noise: float,
    passes: int,
    length: int,
) -> tuple[float, Optional[list[float]]]:
    """Picklable worker: measured QBER and ratio trace for one repetition."""
    stream = (grid_index, repetition)
    qber = measure_qber(settings, root_seed, stream, bitflip_prob=noise)
    alice, bob = error_channel(length, qber, derive_rng(root_seed, *stream, Stream.CHANNEL))
    trace = ratio_trace(alice, bob, qber, passes, derive_rng(root_seed, *stream, Stream.SHUFFLE))
    return qber, trace


def summarize_row(noise: float, cells: Sequence[tuple[float, Optional[list[float]]]]) -> HeatmapRow:
    """Average the repetitions of one noise level."""
    qber = float(np.mean([q for q, _ in cells])) if cells else 0.0
    traces = [trace for _, trace in cells if trace is not None]
    if not traces:
        return HeatmapRow(noise=noise, qber=qber, ratios=None, reps=0)
    ratios = np.mean(np.array(traces, dtype=float), axis=0)
    return HeatmapRow(
        noise=noise, qber=qber, ratios=tuple(float(r) for r in ratios), reps=len(traces)
    )
