"""Experiment drivers and result files.

Includes:
- pipeline: One protocol run end to end
- sweep: Noise sweep rows and S = 2 crossings
- heatmap: Remaining-error ratio per Cascade pass
- runner: Async drivers with optional process pool
- outputs: CSV/JSON writers and readers
"""

from diqsim.experiments.heatmap import HeatmapRow, error_channel, ratio_trace
from diqsim.experiments.pipeline import (
    ProtocolRun,
    RunSummary,
    measure_qber,
    run_protocol,
    run_summary,
)
from diqsim.experiments.runner import (
    BaselineReport,
    ExperimentRunner,
    baseline_run,
    cascade_heatmap,
    noise_sweep,
)
from diqsim.experiments.sweep import SweepRow, locate_crossings, summarize_point

__all__ = [
    "BaselineReport",
    "ExperimentRunner",
    "HeatmapRow",
    "ProtocolRun",
    "RunSummary",
    "SweepRow",
    "baseline_run",
    "cascade_heatmap",
    "error_channel",
    "locate_crossings",
    "measure_qber",
    "noise_sweep",
    "ratio_trace",
    "run_protocol",
    "run_summary",
    "summarize_point",
]
