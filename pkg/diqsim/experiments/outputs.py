"""CSV and JSON result files.

Every CSV written here has a reader that returns the same rows, so results
can be re-loaded for plotting or regression checks. Floats are written with
repr() and parse back exactly.
"""

import csv
import json
import math
from pathlib import Path
from typing import Any, Iterable, Optional, TextIO, Union

from diqsim.bits import BitString
from diqsim.errors import ParameterError
from diqsim.experiments.heatmap import HeatmapRow
from diqsim.experiments.sweep import SweepRow
from diqsim.protocol import RoundTable, RoundType
from diqsim.reconciliation import CascadeTranscript
from diqsim.utils.logger import get_logger

logger = get_logger(__name__)

HEATMAP_FIELDS = ("noise", "pass", "ratio")
ROUNDS_FIELDS = ("index", "type", "x", "y", "a", "b")
PARITY_FIELDS = ("pass", "block", "direction", "parity", "kind")
CORRECTION_FIELDS = ("pass", "position", "block_pass")
NOT_APPLICABLE = "NA"

Target = Union[Path, TextIO]


def _open_writer(target: Target):
    if isinstance(target, Path):
        target.parent.mkdir(parents=True, exist_ok=True)
        return open(target, "w", newline="", encoding="utf-8")
    return None


def _write_rows(target: Target, header: Iterable[str], rows: Iterable[Iterable[Any]]) -> None:
    handle = _open_writer(target)
    stream = handle if handle is not None else target
    try:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    finally:
        if handle is not None:
            handle.close()


def _read_rows(path: Path, header: tuple[str, ...]) -> list[dict[str, str]]:
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.DictReader(f)
        if tuple(reader.fieldnames or ()) != header:
            raise ParameterError(f"{path}: expected columns {','.join(header)}")
        return list(reader)


def _fmt(value: Optional[float]) -> str:
    return NOT_APPLICABLE if value is None or math.isnan(value) else repr(float(value))


def _parse(value: str) -> float:
    return float("nan") if value == NOT_APPLICABLE else float(value)


def write_sweep_csv(rows: Iterable[SweepRow], target: Target) -> None:
    """noise,mean_s,std_s,qber_pre,qber_post,reps"""
    _write_rows(
        target,
        SweepRow.FIELDS,
        ([*(_fmt(v) for v in r.as_row()[:-1]), r.reps] for r in rows),
    )


def read_sweep_csv(path: Path) -> list[SweepRow]:
    return [
        SweepRow(
            noise=_parse(r["noise"]),
            mean_s=_parse(r["mean_s"]),
            std_s=_parse(r["std_s"]),
            qber_pre=_parse(r["qber_pre"]),
            qber_post=_parse(r["qber_post"]),
            reps=int(r["reps"]),
        )
        for r in _read_rows(path, SweepRow.FIELDS)
    ]


def write_heatmap_csv(rows: Iterable[HeatmapRow], passes: int, target: Target) -> None:
    """noise,pass,ratio for pass 0..passes; NA ratios for rows without errors."""

    def cells():
        for row in rows:
            for pass_index in range(passes + 1):
                ratio = row.ratios[pass_index] if row.ratios is not None else None
                yield _fmt(row.noise), pass_index, _fmt(ratio)

    _write_rows(target, HEATMAP_FIELDS, cells())


def read_heatmap_csv(path: Path) -> dict[float, list[float]]:
    """noise -> ratios by pass (NaN where not applicable)."""
    table: dict[float, list[float]] = {}
    for r in _read_rows(path, HEATMAP_FIELDS):
        table.setdefault(float(r["noise"]), []).append(_parse(r["ratio"]))
    return table


def write_rounds_csv(rounds: RoundTable, target: Target) -> None:
    """index,type,x,y,a,b"""
    _write_rows(
        target,
        ROUNDS_FIELDS,
        ((r.index, r.round_type.value, r.x, r.y, r.a, r.b) for r in rounds),
    )


def read_rounds_csv(path: Path) -> RoundTable:
    rows = _read_rows(path, ROUNDS_FIELDS)
    return RoundTable(
        index=[int(r["index"]) for r in rows],
        is_key=[RoundType(r["type"]) is RoundType.KEY for r in rows],
        x=[int(r["x"]) for r in rows],
        y=[int(r["y"]) for r in rows],
        a=[int(r["a"]) for r in rows],
        b=[int(r["b"]) for r in rows],
    )


def write_transcript_csv(
    transcript: CascadeTranscript, parities: Target, corrections: Target
) -> None:
    """Parity messages and correction events as two CSV files."""
    _write_rows(parities, PARITY_FIELDS, transcript.parity_rows())
    _write_rows(corrections, CORRECTION_FIELDS, transcript.correction_rows())


def to_json(data: Any) -> str:
    """Stable JSON: sorted keys, two-space indent, NaN mapped to null."""

    def clean(value: Any) -> Any:
        if isinstance(value, float) and math.isnan(value):
            return None
        if isinstance(value, dict):
            return {k: clean(v) for k, v in value.items()}
        if isinstance(value, (list, tuple)):
            return [clean(v) for v in value]
        return value

    return json.dumps(clean(data), sort_keys=True, indent=2) + "\n"


def write_json(data: Any, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(to_json(data), encoding="utf-8")
    logger.info("results_written", path=str(path))


def read_bits(path: Path) -> BitString:
    """Read a key file of '0'/'1' characters (whitespace ignored).

    Raises:
        ParameterError: If the file holds anything else.
    """
    try:
        return BitString.from_str(path.read_text(encoding="ascii"))
    except ValueError as e:
        raise ParameterError(f"{path}: not a 0/1 bit file") from e


def write_bits(bits: BitString, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(bits.to_str() + "\n", encoding="ascii")
