"""Noise sweep aggregation and S = 2 crossing search."""

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from diqsim.experiments.pipeline import RunSummary
from diqsim.errors import ParameterError


@dataclass(frozen=True)
class SweepRow:
    """Aggregated statistics at one noise level.

    Attributes:
        noise: Per-party bit-flip probability.
        mean_s: Mean CHSH value over repetitions.
        std_s: Sample standard deviation of S (0 for a single repetition).
        qber_pre: Mean QBER before Cascade.
        qber_post: Mean QBER after Cascade.
        reps: Number of repetitions.
    """

    noise: float
    mean_s: float
    std_s: float
    qber_pre: float
    qber_post: float
    reps: int

    FIELDS = ("noise", "mean_s", "std_s", "qber_pre", "qber_post", "reps")

    def as_row(self) -> tuple:
        return tuple(getattr(self, name) for name in self.FIELDS)


def _mean(values: Sequence[Optional[float]]) -> float:
    present = [v for v in values if v is not None]
    return float(np.mean(present)) if present else float("nan")


def summarize_point(noise: float, summaries: Sequence[RunSummary]) -> SweepRow:
    """Reduce the runs of one grid point, in repetition order."""
    if not summaries:
        raise ParameterError("cannot summarize a grid point without runs")
    s_values = np.array([s.s_value for s in summaries if s.s_value is not None], dtype=float)
    std_s = float(np.std(s_values, ddof=1)) if s_values.size > 1 else 0.0
    return SweepRow(
        noise=noise,
        mean_s=float(s_values.mean()) if s_values.size else float("nan"),
        std_s=std_s,
        qber_pre=_mean([s.qber_pre for s in summaries]),
        qber_post=_mean([s.qber_post for s in summaries]),
        reps=len(summaries),
    )


def locate_crossings(rows: Sequence[SweepRow], level: float = 2.0) -> list[float]:
    """Noise values where mean_s crosses level, by linear interpolation.

    A grid point lying exactly on the level counts once.
    """
    crossings: list[float] = []
    for left, right in zip(rows, rows[1:]):
        d_left, d_right = left.mean_s - level, right.mean_s - level
        if np.isnan(d_left) or np.isnan(d_right):
            continue
        if d_left == 0.0:
            if not crossings or crossings[-1] != left.noise:
                crossings.append(left.noise)
        elif d_left * d_right < 0.0:
            t = d_left / (d_left - d_right)
            crossings.append(left.noise + t * (right.noise - left.noise))
    if rows and rows[-1].mean_s == level and (not crossings or crossings[-1] != rows[-1].noise):
        crossings.append(rows[-1].noise)
    return crossings
