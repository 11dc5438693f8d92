"""diqsim command-line interface.

Subcommands:
  simulate   one or more protocol runs, summary JSON
  sweep      S and QBER against bit-flip noise, CSV
  heatmap    remaining-error ratio per Cascade pass, CSV
  cascade    standalone reconciliation of two bit files or a simulated channel
  rate       key rate for one (S, Q) or a table along S = 2*sqrt(2)(1 - 2Q)

Exit codes: 0 success, 2 protocol abort, 1 usage or configuration error.
"""

import argparse
import asyncio
import sys
from pathlib import Path
from typing import Awaitable, Callable, Optional, Sequence

from diqsim import __version__
from diqsim.config import Settings
from diqsim.errors import DiqsimError, ProtocolAbort, UsageError
from diqsim.experiments import ExperimentRunner, error_channel, locate_crossings, run_protocol
from diqsim.experiments.outputs import (
    read_bits,
    to_json,
    write_bits,
    write_heatmap_csv,
    write_json,
    write_rounds_csv,
    write_sweep_csv,
    write_transcript_csv,
)
from diqsim.postprocessing import isotropic_chsh, key_rate
from diqsim.protocol import ProtocolSetup
from diqsim.reconciliation import leakage_efficiency, reconcile
from diqsim.utils.logger import get_logger, log_error, setup_logger
from diqsim.utils.seeding import SEED_MASK, Stream, derive_rng

logger = get_logger(__name__)

Handler = Callable[[argparse.Namespace, Settings], Awaitable[int]]


class _Parser(argparse.ArgumentParser):
    """ArgumentParser that raises instead of exiting on bad usage."""

    def error(self, message: str):
        raise UsageError(f"{self.prog}: {message}")


def parse_grid(text: str) -> list[float]:
    """Parse 'start:stop:step' (inclusive) or a comma-separated list."""
    try:
        if ":" in text:
            start, stop, step = (float(part) for part in text.split(":"))
            if step <= 0 or stop < start:
                raise ValueError
            count = int(round((stop - start) / step))
            return [round(start + i * step, 12) for i in range(count + 1)]
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid grid {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, help="Root seed (default from config)")
    common.add_argument("-c", "--config", type=Path, help="Path to configuration file")
    common.add_argument("--out", type=Path, help="Output directory")
    common.add_argument("--workers", type=int, help="Worker processes for repetitions")
    common.add_argument("--debug", action="store_true", help="Enable debug logging")
    common.add_argument("--json-logs", action="store_true", help="Log as JSON lines")

    parser = _Parser(
        prog="diqsim",
        description="Device-independent QKD pipeline simulator",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  diqsim simulate --rounds 10000 --seed 7
  diqsim sweep --grid 0:1:0.02 --reps 50
  diqsim heatmap --passes 20 --reps 10
  diqsim cascade --length 10000 --qber 0.078
  diqsim rate --s 2.427 --q 0.071
        """,
    )
    parser.add_argument("-v", "--version", action="version", version=f"diqsim {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    simulate = sub.add_parser("simulate", parents=[common], help="Run the protocol")
    simulate.add_argument("--rounds", type=int, help="Rounds per run")
    simulate.add_argument("--reps", type=int, default=1, help="Repetitions (default 1)")
    simulate.add_argument(
        "--dump-rounds", action="store_true", help="Write rounds and transcript CSVs (single run)"
    )

    sweep = sub.add_parser("sweep", parents=[common], help="Noise sweep")
    sweep.add_argument("--grid", type=parse_grid, help="start:stop:step or comma list")
    sweep.add_argument("--reps", type=int, help="Repetitions per grid point")
    sweep.add_argument("--rounds", type=int, help="Rounds per run")

    heatmap = sub.add_parser("heatmap", parents=[common], help="Cascade convergence heatmap")
    heatmap.add_argument("--grid", type=parse_grid, help="start:stop:step or comma list")
    heatmap.add_argument("--passes", type=int, help="Cascade passes")
    heatmap.add_argument("--reps", type=int, help="Repetitions per noise level")
    heatmap.add_argument("--length", type=int, help="String length")

    cascade = sub.add_parser("cascade", parents=[common], help="Standalone reconciliation")
    cascade.add_argument("--alice", type=Path, help="Alice's key file (0/1 text)")
    cascade.add_argument("--bob", type=Path, help="Bob's key file (0/1 text)")
    cascade.add_argument("--length", type=int, help="Simulated string length")
    cascade.add_argument("--qber", type=float, help="Simulated channel error rate")
    cascade.add_argument("--passes", type=int, help="Cascade passes")

    rate = sub.add_parser("rate", parents=[common], help="Secret key rate")
    rate.add_argument("--s", type=float, help="CHSH value")
    rate.add_argument("--q", type=float, help="QBER")
    rate.add_argument(
        "--grid", type=parse_grid, default="0:0.1:0.005", help="QBER grid for the table"
    )
    return parser


def apply_overrides(settings: Settings, args: argparse.Namespace) -> Settings:
    """Fold --seed, --workers and --out into the experiment section."""
    update = {}
    if args.seed is not None:
        if not 0 <= args.seed <= SEED_MASK:
            raise UsageError(f"--seed must lie in [0, 2^64), got {args.seed}")
        update["root_seed"] = args.seed
    if args.workers is not None:
        if args.workers < 1:
            raise UsageError("--workers must be positive")
        update["workers"] = args.workers
    if args.out is not None:
        update["output_dir"] = args.out
    if not update:
        return settings
    return settings.model_copy(
        update={"experiment": settings.experiment.model_copy(update=update)}
    )


def _positive(value: Optional[int], flag: str) -> Optional[int]:
    if value is not None and value < 1:
        raise UsageError(f"{flag} must be positive")
    return value


async def cmd_simulate(args: argparse.Namespace, settings: Settings) -> int:
    rounds = _positive(args.rounds, "--rounds")
    reps = _positive(args.reps, "--reps")
    seed = settings.experiment.root_seed

    if reps == 1:
        run = run_protocol(ProtocolSetup.from_config(settings), settings, seed, (0, 0), rounds)
        data = run.summary.to_dict()
        if args.dump_rounds:
            write_rounds_csv(run.rounds, settings.get_output_path("rounds.csv"))
            if run.transcript is not None:
                write_transcript_csv(
                    run.transcript,
                    settings.get_output_path("parities.csv"),
                    settings.get_output_path("corrections.csv"),
                )
        aborted = run.summary.aborted
    else:
        async with ExperimentRunner(settings) as runner:
            report = await runner.baseline(reps, rounds)
        data = dict(report.to_dict(), seed=seed)
        aborted = report.aborted == reps

    write_json(data, settings.get_output_path("summary.json"))
    sys.stdout.write(to_json(data))
    return 2 if aborted else 0


async def cmd_sweep(args: argparse.Namespace, settings: Settings) -> int:
    if args.grid is not None and not args.grid:
        raise UsageError("sweep grid is empty")
    async with ExperimentRunner(settings) as runner:
        rows = await runner.sweep(
            args.grid, _positive(args.reps, "--reps"), _positive(args.rounds, "--rounds")
        )
    logger.info("sweep_crossings", crossings=locate_crossings(rows))
    write_sweep_csv(rows, settings.get_output_path("sweep.csv"))
    write_sweep_csv(rows, sys.stdout)
    return 0


async def cmd_heatmap(args: argparse.Namespace, settings: Settings) -> int:
    passes = _positive(args.passes, "--passes") or settings.cascade.heatmap_passes
    async with ExperimentRunner(settings) as runner:
        rows = await runner.heatmap(
            args.grid, passes, _positive(args.reps, "--reps"), _positive(args.length, "--length")
        )
    write_heatmap_csv(rows, passes, settings.get_output_path("heatmap.csv"))
    write_heatmap_csv(rows, passes, sys.stdout)
    return 0


async def cmd_cascade(args: argparse.Namespace, settings: Settings) -> int:
    seed = settings.experiment.root_seed
    passes = _positive(args.passes, "--passes") or settings.cascade.passes

    if args.alice is not None or args.bob is not None:
        if args.alice is None or args.bob is None:
            raise UsageError("--alice and --bob must be given together")
        alice, bob = read_bits(args.alice), read_bits(args.bob)
    elif args.length is not None and args.qber is not None:
        if not 0.0 <= args.qber <= 1.0:
            raise UsageError("--qber must lie in [0, 1]")
        length = _positive(args.length, "--length")
        alice, bob = error_channel(length, args.qber, derive_rng(seed, 0, 0, Stream.CHANNEL))
    else:
        raise UsageError("give --alice/--bob files or --length and --qber")

    n = len(alice)
    if n != len(bob):
        raise UsageError(f"key files differ in length ({n} vs {len(bob)})")
    q = alice.hamming(bob) / n if n else 0.0
    corrected, transcript = reconcile(
        alice, bob, min(q, 0.5), passes, derive_rng(seed, 0, 0, Stream.SHUFFLE)
    )

    write_bits(corrected, settings.get_output_path("corrected.txt"))
    write_transcript_csv(
        transcript,
        settings.get_output_path("parities.csv"),
        settings.get_output_path("corrections.csv"),
    )
    data = {
        "n": n,
        "passes": transcript.passes,
        "initial_errors": transcript.initial_errors,
        "residual_errors": list(transcript.residual_errors),
        "leaked_bits": transcript.leaked_bits,
        "efficiency": leakage_efficiency(transcript, n, q) if 0.0 < q < 0.5 else None,
        "seed": seed,
    }
    write_json(data, settings.get_output_path("cascade.json"))
    sys.stdout.write(to_json(data))
    return 0


async def cmd_rate(args: argparse.Namespace, settings: Settings) -> int:
    if (args.s is None) != (args.q is None):
        raise UsageError("--s and --q must be given together")

    if args.s is not None:
        report = key_rate(args.s, args.q)
        sys.stdout.write(to_json({"s": args.s, "q": args.q, "rate_per_bit": report.rate_per_bit}))
        return 0

    sys.stdout.write("q,s,rate_per_bit\n")
    for q in args.grid:
        s = isotropic_chsh(q)
        rate = key_rate(s, q).rate_per_bit if s > 2.0 and q < 0.5 else float("nan")
        sys.stdout.write(f"{q!r},{s!r},{rate!r}\n")
    return 0


COMMANDS: dict[str, Handler] = {
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
    "heatmap": cmd_heatmap,
    "cascade": cmd_cascade,
    "rate": cmd_rate,
}


def cli_dispatch(argv: Sequence[str]) -> int:
    """Parse argv, run one subcommand and return its exit code."""
    try:
        args = build_parser().parse_args(list(argv))
    except UsageError as e:
        print(str(e), file=sys.stderr)
        return 1
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 0

    try:
        settings = apply_overrides(Settings.load(args.config), args)
        log_level = "DEBUG" if args.debug else settings.app.log_level
        setup_logger(level=log_level, json_output=args.json_logs or settings.app.json_logs)
        return asyncio.run(COMMANDS[args.command](args, settings))
    except ProtocolAbort as e:
        logger.warning("protocol_aborted", reason=e.reason, s_value=e.s_value)
        print(f"protocol aborted: {e}", file=sys.stderr)
        return 2
    except DiqsimError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except Exception as e:
        log_error(e, {"command": args.command})
        logger.error("fatal_error", error=str(e))
        return 1


def main() -> None:
    """Main entry point."""
    sys.exit(cli_dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
