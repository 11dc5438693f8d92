"""Shared fixtures."""

from pathlib import Path

import numpy as np
import pytest

from diqsim.config import ExperimentConfig, Settings
from diqsim.protocol import InputDistribution, RoundRecord, RoundTable, RoundType

CONFIG_DIR = Path(__file__).resolve().parent.parent / "config"
DEFAULT_CONFIG = CONFIG_DIR / "default_config.yaml"
WORKED_EXAMPLE_CONFIG = CONFIG_DIR / "worked_example.yaml"

# Twenty rounds with x in {0, 1}, y in {0, 1, 2}; (0, 2) is the key pair.
WORKED_EXAMPLE = {
    "type": "T T K K K K T T T T K T K T T K K K T T",
    "x": "1 1 0 0 0 0 1 1 1 1 0 1 0 1 1 0 0 0 1 1",
    "a": "+ + + + - + - - - + + - + - + - - + - +",
    "y": "0 0 2 2 2 2 1 1 0 1 2 0 2 1 1 2 2 2 1 1",
    "b": "- - - + - - - + + - - - + - - - - - + +",
}
# Published sifted rows for the nine key rounds.
PUBLISHED_ALICE_ROW = "110111001"
PUBLISHED_BOB_ROW = "010001001"
KEY_ROUNDS = (3, 4, 5, 6, 11, 13, 16, 17, 18)


def _sign(token: str) -> int:
    return 1 if token == "+" else -1


@pytest.fixture
def worked_example_rounds() -> RoundTable:
    """The twenty-round worked example as a RoundTable."""
    columns = {name: row.split() for name, row in WORKED_EXAMPLE.items()}
    records = [
        RoundRecord(
            index=i + 1,
            round_type=RoundType.KEY if columns["type"][i] == "K" else RoundType.TEST,
            x=int(columns["x"][i]),
            y=int(columns["y"][i]),
            a=_sign(columns["a"][i]),
            b=_sign(columns["b"][i]),
        )
        for i in range(20)
    ]
    return RoundTable.from_records(records)


@pytest.fixture
def worked_example_distribution() -> InputDistribution:
    """Input distribution of the worked example."""
    test_pairs = ((0, 0), (0, 1), (1, 0), (1, 1))
    return InputDistribution(
        pairs=test_pairs + ((0, 2),),
        probabilities=(0.125, 0.125, 0.125, 0.125, 0.5),
        test_pairs=frozenset(test_pairs),
        key_pairs=frozenset({(0, 2)}),
    )


@pytest.fixture
def settings(tmp_path) -> Settings:
    """Default settings with small experiment sizes."""
    return Settings(
        experiment=ExperimentConfig(
            n_rounds=2000,
            repetitions=2,
            root_seed=11,
            noise_grid=[0.0, 0.5],
            heatmap_grid=[0.0, 0.05],
            heatmap_length=2000,
            output_dir=tmp_path / "results",
        )
    )


@pytest.fixture
def rng() -> np.random.Generator:
    """Seeded generator for ad-hoc draws in tests."""
    return np.random.default_rng(20240501)
