"""Async experiment drivers.

Repetitions are independent: every one draws from its own seeded streams,
so they can run in worker processes in any order. Results are gathered in
submission order, which fixes the reduction order.
"""

import asyncio
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Any, Callable, Optional, Sequence

import numpy as np

from diqsim.config import Settings
from diqsim.experiments.heatmap import HeatmapRow, heatmap_cell, summarize_row
from diqsim.experiments.pipeline import RunSummary, run_summary
from diqsim.experiments.sweep import SweepRow, summarize_point
from diqsim.utils.logger import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True)
class BaselineReport:
    """Repeated runs of the calibrated configuration."""

    runs: tuple[RunSummary, ...]

    @property
    def mean_s(self) -> float:
        values = [r.s_value for r in self.runs if r.s_value is not None]
        return float(np.mean(values)) if values else float("nan")

    @property
    def std_s(self) -> float:
        values = [r.s_value for r in self.runs if r.s_value is not None]
        return float(np.std(values, ddof=1)) if len(values) > 1 else 0.0

    @property
    def mean_qber(self) -> float:
        values = [r.qber_pre for r in self.runs if r.qber_pre is not None]
        return float(np.mean(values)) if values else float("nan")

    @property
    def aborted(self) -> int:
        return sum(r.aborted for r in self.runs)

    def to_dict(self) -> dict[str, Any]:
        return {
            "mean_s": self.mean_s,
            "std_s": self.std_s,
            "mean_qber": self.mean_qber,
            "aborted_runs": self.aborted,
            "runs": [r.to_dict() for r in self.runs],
        }


class ExperimentRunner:
    """Runs the baseline, noise-sweep and heatmap experiments.

    With workers > 1 repetitions go to a process pool; with 1 they run in
    this process. Use as an async context manager to release the pool.
    """

    def __init__(self, settings: Settings, workers: Optional[int] = None):
        self.settings = settings
        self.workers = workers or settings.experiment.workers
        self.root_seed = settings.experiment.root_seed
        self._executor: Optional[ProcessPoolExecutor] = (
            ProcessPoolExecutor(max_workers=self.workers) if self.workers > 1 else None
        )

    async def __aenter__(self) -> "ExperimentRunner":
        return self

    async def __aexit__(self, exc_type, exc_val, exc_tb) -> bool:
        self.shutdown()
        return False

    def shutdown(self) -> None:
        if self._executor is not None:
            self._executor.shutdown(wait=True)
            self._executor = None

    async def _map(self, fn: Callable[..., Any], jobs: Sequence[tuple]) -> list[Any]:
        if self._executor is None:
            return [fn(*args) for args in jobs]
        loop = asyncio.get_running_loop()
        futures = [loop.run_in_executor(self._executor, fn, *args) for args in jobs]
        return list(await asyncio.gather(*futures))

    async def baseline(
        self, repetitions: Optional[int] = None, n_rounds: Optional[int] = None
    ) -> BaselineReport:
        """Repeat the calibrated run; repetition r uses stream (0, r)."""
        repetitions = repetitions or self.settings.experiment.repetitions
        jobs = [
            (self.settings, self.root_seed, (0, rep), None, n_rounds) for rep in range(repetitions)
        ]
        report = BaselineReport(runs=tuple(await self._map(run_summary, jobs)))
        logger.info(
            "baseline_complete",
            repetitions=repetitions,
            mean_s=report.mean_s,
            mean_qber=report.mean_qber,
        )
        return report

    async def sweep(
        self,
        grid: Optional[Sequence[float]] = None,
        repetitions: Optional[int] = None,
        n_rounds: Optional[int] = None,
    ) -> list[SweepRow]:
        """S and pre/post-Cascade QBER at every bit-flip probability of the grid."""
        grid = list(grid if grid is not None else self.settings.experiment.noise_grid)
        repetitions = repetitions or self.settings.experiment.repetitions
        jobs = [
            (self.settings, self.root_seed, (g, rep), noise, n_rounds, False, True)
            for g, noise in enumerate(grid)
            for rep in range(repetitions)
        ]
        summaries = await self._map(run_summary, jobs)

        rows = []
        for g, noise in enumerate(grid):
            row = summarize_point(noise, summaries[g * repetitions : (g + 1) * repetitions])
            logger.info(
                "sweep_point_complete", noise=noise, mean_s=row.mean_s, qber_pre=row.qber_pre
            )
            rows.append(row)
        return rows

    async def heatmap(
        self,
        grid: Optional[Sequence[float]] = None,
        passes: Optional[int] = None,
        repetitions: Optional[int] = None,
        length: Optional[int] = None,
    ) -> list[HeatmapRow]:
        """Mean remaining-error ratio per pass at every noise level of the grid."""
        grid = list(grid if grid is not None else self.settings.experiment.heatmap_grid)
        passes = passes or self.settings.cascade.heatmap_passes
        repetitions = repetitions or self.settings.experiment.repetitions
        length = length or self.settings.experiment.heatmap_length
        jobs = [
            (self.settings, self.root_seed, g, rep, noise, passes, length)
            for g, noise in enumerate(grid)
            for rep in range(repetitions)
        ]
        cells = await self._map(heatmap_cell, jobs)

        rows = []
        for g, noise in enumerate(grid):
            row = summarize_row(noise, cells[g * repetitions : (g + 1) * repetitions])
            logger.info(
                "heatmap_row_complete", noise=noise, qber=row.qber, applicable=row.applicable
            )
            rows.append(row)
        return rows


def baseline_run(
    settings: Settings, repetitions: Optional[int] = None, n_rounds: Optional[int] = None
) -> BaselineReport:
    """Synchronous entry to ExperimentRunner.baseline."""

    async def _run() -> BaselineReport:
        async with ExperimentRunner(settings) as runner:
            return await runner.baseline(repetitions, n_rounds)

    return asyncio.run(_run())


def noise_sweep(
    settings: Settings,
    grid: Optional[Sequence[float]] = None,
    repetitions: Optional[int] = None,
    n_rounds: Optional[int] = None,
) -> list[SweepRow]:
    """Synchronous entry to ExperimentRunner.sweep."""

    async def _run() -> list[SweepRow]:
        async with ExperimentRunner(settings) as runner:
            return await runner.sweep(grid, repetitions, n_rounds)

    return asyncio.run(_run())


def cascade_heatmap(
    settings: Settings,
    grid: Optional[Sequence[float]] = None,
    passes: Optional[int] = None,
    repetitions: Optional[int] = None,
    length: Optional[int] = None,
) -> list[HeatmapRow]:
    """Synchronous entry to ExperimentRunner.heatmap."""

    async def _run() -> list[HeatmapRow]:
        async with ExperimentRunner(settings) as runner:
            return await runner.heatmap(grid, passes, repetitions, length)

    return asyncio.run(_run())
