"""One protocol run end to end.

rounds -> classification -> CHSH estimate and abort check -> sifting ->
QBER -> Cascade -> verification -> key rate -> privacy amplification.
"""

import math
from dataclasses import asdict, dataclass
from typing import Any, Optional

import numpy as np

from diqsim.bits import BitString
from diqsim.config import TSIRELSON_BOUND, Settings
from diqsim.errors import IncompleteStatisticsError, ProtocolAbort
from diqsim.postprocessing import VerificationResult, key_rate, privacy_amplify, verify_keys
from diqsim.protocol import (
    AbortDecision,
    ProtocolSetup,
    RoundTable,
    SiftedKeys,
    abort_check,
    classify_rounds,
    estimate_chsh,
    estimate_qber,
    qber_abort_check,
    run_rounds,
    sift_keys,
)
from diqsim.reconciliation import CascadeTranscript, leakage_efficiency, reconcile
from diqsim.utils.logger import LogContext, get_logger, log_protocol_event
from diqsim.utils.seeding import Stream, derive_rng

logger = get_logger(__name__)


@dataclass(frozen=True)
class RunSummary:
    """Outcome of one protocol run, as written to the summary JSON.

    Attributes:
        s_value: Estimated CHSH value (None if a designated pair had no rounds).
        qber_pre: Sifted-key QBER before reconciliation.
        qber_post: QBER after Cascade (None if Cascade did not run).
        sifted_len: Number of key bits entering reconciliation.
        leaked_bits: Parities disclosed by Cascade.
        efficiency: leaked_bits / (n * h(Q)), None when Q is 0 or 0.5.
        final_len: Secret key length (0 on abort).
        aborted: True if the protocol aborted.
        abort_reason: Machine-readable abort reason.
        seed: Root seed of the run.
        verified: Result of key verification (None if not performed).
    """

    s_value: Optional[float]
    qber_pre: Optional[float]
    qber_post: Optional[float]
    sifted_len: int
    leaked_bits: int
    efficiency: Optional[float]
    final_len: int
    aborted: bool
    abort_reason: Optional[str]
    seed: int
    verified: Optional[bool] = None

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


@dataclass
class ProtocolRun:
    """Full artefacts of one run; only the summary crosses process boundaries."""

    summary: RunSummary
    rounds: RoundTable
    keys: SiftedKeys
    corrected: Optional[BitString] = None
    transcript: Optional[CascadeTranscript] = None
    final_key: Optional[BitString] = None


def _schedule_estimate(
    keys: SiftedKeys, fraction: float, rng: np.random.Generator
) -> tuple[float, SiftedKeys]:
    """QBER estimate for the block schedule.

    With fraction < 1 a random sample of positions is disclosed, compared and
    removed from the keys; with 1.0 the exact QBER is used and nothing is removed.
    """
    n = len(keys)
    if fraction >= 1.0 or n < 2:
        return estimate_qber(keys), keys
    size = min(n - 1, max(1, math.ceil(fraction * n)))
    sample = np.zeros(n, dtype=bool)
    sample[rng.choice(n, size=size, replace=False)] = True
    alice, bob = keys.alice_bits.bits, keys.bob_bits.bits
    estimate = float(np.count_nonzero(alice[sample] != bob[sample]) / size)
    kept = np.flatnonzero(~sample)
    remaining = SiftedKeys(
        alice_bits=BitString(alice[kept]),
        bob_bits=BitString(bob[kept]),
        source_round_indices=tuple(keys.source_round_indices[i] for i in kept),
    )
    return estimate, remaining


def run_protocol(
    setup: ProtocolSetup,
    settings: Settings,
    root_seed: int,
    stream_key: tuple[int, ...] = (0, 0),
    n_rounds: Optional[int] = None,
    passes: Optional[int] = None,
    amplify: bool = True,
    force_reconcile: bool = False,
) -> ProtocolRun:
    """Run the protocol once.

    Args:
        setup: Devices and input distribution.
        settings: Protocol, cascade and postprocessing settings.
        root_seed: Experiment root seed.
        stream_key: Prefix of every random stream used by the run.
        n_rounds: Number of rounds (default from settings).
        passes: Cascade passes (default from settings).
        amplify: Run verification, key rate and privacy amplification.
        force_reconcile: Run Cascade even after an abort (noise sweeps need
            post-Cascade QBER at every noise level).

    Returns:
        ProtocolRun. Aborts are reported in the summary, not raised.
    """
    n_rounds = n_rounds or settings.experiment.n_rounds
    passes = passes or settings.cascade.passes
    protocol = settings.protocol
    post = settings.postprocessing

    with LogContext(seed=root_seed, stream=list(stream_key)):
        rounds = run_rounds(n_rounds, setup, derive_rng(root_seed, *stream_key, Stream.ROUNDS))
        test_indices, key_indices = classify_rounds(rounds, setup.distribution)
        keys = sift_keys(rounds.with_indices(key_indices))
        qber_pre = estimate_qber(keys) if len(keys) else None

        abort_reason: Optional[str] = None
        s_value: Optional[float] = None
        try:
            estimate = estimate_chsh(rounds.with_indices(test_indices), setup.chsh_roles)
            s_value = estimate.s_value
            if abort_check(estimate, protocol.s_threshold) is AbortDecision.ABORT:
                abort_reason = "no_bell_violation"
        except IncompleteStatisticsError:
            abort_reason = "incomplete_statistics"

        if abort_reason is None and qber_pre is None:
            abort_reason = "no_key_rounds"
        if (
            abort_reason is None
            and protocol.qber_abort_enabled
            and qber_abort_check(qber_pre, protocol.qber_threshold) is AbortDecision.ABORT
        ):
            abort_reason = "qber_above_threshold"

        run = ProtocolRun(
            summary=RunSummary(
                s_value=s_value,
                qber_pre=qber_pre,
                qber_post=None,
                sifted_len=len(keys),
                leaked_bits=0,
                efficiency=None,
                final_len=0,
                aborted=abort_reason is not None,
                abort_reason=abort_reason,
                seed=root_seed,
            ),
            rounds=rounds,
            keys=keys,
        )

        if not len(keys) or (abort_reason is not None and not force_reconcile):
            if abort_reason is not None:
                log_protocol_event("protocol_aborted", reason=abort_reason, s_value=s_value)
            return run

        schedule_q, working = _schedule_estimate(
            keys,
            settings.cascade.qber_sample_fraction,
            derive_rng(root_seed, *stream_key, Stream.SAMPLE),
        )
        alice = working.alice_bits
        corrected, transcript = reconcile(
            alice,
            working.bob_bits,
            min(schedule_q, 0.5),
            passes,
            derive_rng(root_seed, *stream_key, Stream.SHUFFLE),
        )
        n = len(alice)
        true_q = transcript.initial_errors / n
        efficiency = leakage_efficiency(transcript, n, true_q) if 0.0 < true_q < 0.5 else None
        run.corrected = corrected
        run.transcript = transcript
        summary = dict(
            run.summary.to_dict(),
            qber_post=alice.hamming(corrected) / n,
            sifted_len=n,
            leaked_bits=transcript.leaked_bits,
            efficiency=efficiency,
        )

        if abort_reason is None and amplify:
            hash_rng = derive_rng(root_seed, *stream_key, Stream.HASH)
            tag_seed = int(hash_rng.integers(0, 2**63))
            outcome = verify_keys(alice, corrected, post.tag_bits, tag_seed)
            verified = outcome is VerificationResult.MATCH
            summary["verified"] = verified
            if not verified:
                summary.update(aborted=True, abort_reason="verification_failed")
            elif true_q < 0.5:
                try:
                    report = key_rate(
                        min(s_value, TSIRELSON_BOUND),
                        true_q,
                        leaked_bits=transcript.leaked_bits,
                        sifted_len=n,
                        tag_bits=post.tag_bits,
                        margin_bits=post.margin_bits,
                        use_measured_leakage=post.use_measured_leakage,
                    )
                    summary["final_len"] = report.final_len
                except ProtocolAbort as abort:
                    summary.update(aborted=True, abort_reason=abort.reason)
            if summary["final_len"] > 0:
                run.final_key, _ = privacy_amplify(alice, summary["final_len"], hash_rng)

        run.summary = RunSummary(**summary)
        if run.summary.aborted:
            log_protocol_event("protocol_aborted", reason=run.summary.abort_reason, s_value=s_value)
        else:
            log_protocol_event(
                "key_distilled",
                s_value=s_value,
                qber_pre=qber_pre,
                leaked_bits=transcript.leaked_bits,
                final_len=run.summary.final_len,
            )
        return run


def run_summary(
    settings: Settings,
    root_seed: int,
    stream_key: tuple[int, ...],
    bitflip_prob: Optional[float] = None,
    n_rounds: Optional[int] = None,
    amplify: bool = True,
    force_reconcile: bool = False,
) -> RunSummary:
    """Picklable worker: one run, summary only."""
    setup = ProtocolSetup.from_config(settings)
    if bitflip_prob is not None:
        setup = setup.with_noise(setup.noise.with_bitflip(bitflip_prob))
    return run_protocol(
        setup,
        settings,
        root_seed,
        stream_key,
        n_rounds=n_rounds,
        amplify=amplify,
        force_reconcile=force_reconcile,
    ).summary


def measure_qber(
    settings: Settings,
    root_seed: int,
    stream_key: tuple[int, ...],
    bitflip_prob: Optional[float] = None,
    n_rounds: Optional[int] = None,
) -> float:
    """Picklable worker: sifted-key QBER of one run, without reconciliation.

    Draws the same rounds as run_protocol for the same stream key. Returns 0.0
    when no key rounds were drawn.
    """
    setup = ProtocolSetup.from_config(settings)
    if bitflip_prob is not None:
        setup = setup.with_noise(setup.noise.with_bitflip(bitflip_prob))
    n_rounds = n_rounds or settings.experiment.n_rounds
    rounds = run_rounds(n_rounds, setup, derive_rng(root_seed, *stream_key, Stream.ROUNDS))
    _, key_indices = classify_rounds(rounds, setup.distribution)
    keys = sift_keys(rounds.with_indices(key_indices))
    return estimate_qber(keys) if len(keys) else 0.0
