"""Protocol round generation and classification.

Rounds are kept in a columnar RoundTable (numpy arrays) rather than a list
of objects; iterating a table yields RoundRecord values, so callers that
want records still get them.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Iterator, Optional, Sequence, Union

import numpy as np

from diqsim.config import ProtocolConfig, Settings, get_settings
from diqsim.devices.angles import AngleMap
from diqsim.devices.model import NoiseModel, Party, sample_outcomes
from diqsim.errors import ClassificationError, ConfigurationError, ParameterError
from diqsim.utils.logger import get_logger

logger = get_logger(__name__)

PROBABILITY_TOLERANCE = 1e-9

InputPair = tuple[int, int]


class RoundType(str, Enum):
    """Round designation."""

    TEST = "test"
    KEY = "key"


@dataclass(frozen=True)
class RoundRecord:
    """One protocol round.

    Attributes:
        index: 1-based round number.
        round_type: Test or key round.
        x: Alice's input.
        y: Bob's input.
        a: Alice's outcome (+1/-1).
        b: Bob's outcome (+1/-1).
    """

    index: int
    round_type: RoundType
    x: int
    y: int
    a: int
    b: int


@dataclass(frozen=True)
class ChshRoles:
    """Which inputs play A0, A1, B0, B1 in the CHSH combination."""

    alice: InputPair = (0, 1)
    bob: InputPair = (0, 1)

    def designated_pairs(self) -> dict[InputPair, InputPair]:
        """Map CHSH role (i, j) -> actual input pair (x, y)."""
        return {
            (i, j): (self.alice[i], self.bob[j])
            for i in (0, 1)
            for j in (0, 1)
        }


@dataclass(frozen=True)
class InputDistribution:
    """Joint distribution of input pairs and their designation.

    Attributes:
        pairs: Input pairs that can be drawn.
        probabilities: Probability of each pair.
        test_pairs: Pairs designated as test rounds.
        key_pairs: Pairs designated as key rounds.
    """

    pairs: tuple[InputPair, ...]
    probabilities: tuple[float, ...]
    test_pairs: frozenset[InputPair]
    key_pairs: frozenset[InputPair]

    def __post_init__(self):
        if not self.pairs:
            raise ConfigurationError("input distribution has no pairs")
        if len(self.pairs) != len(self.probabilities):
            raise ConfigurationError("pairs and probabilities differ in length")
        if any(p < 0 for p in self.probabilities):
            raise ConfigurationError("negative input-pair probability")
        total = sum(self.probabilities)
        if abs(total - 1.0) > PROBABILITY_TOLERANCE:
            raise ConfigurationError(f"input-pair probabilities sum to {total}, not 1")
        if self.test_pairs & self.key_pairs:
            raise ConfigurationError("a pair cannot be both test and key")
        undesignated = set(self.pairs) - self.test_pairs - self.key_pairs
        if undesignated:
            raise ConfigurationError(f"pairs {sorted(undesignated)} are neither test nor key")

    @classmethod
    def from_config(cls, protocol: Optional[ProtocolConfig] = None) -> "InputDistribution":
        """Build the distribution from the protocol config section.

        Without explicit pair_probabilities, test_fraction is split uniformly over
        the test pairs and the remainder uniformly over the key pairs.
        """
        protocol = protocol or get_settings().protocol
        test_pairs = [tuple(p) for p in protocol.test_pairs]
        key_pairs = [tuple(p) for p in protocol.key_pairs]

        if protocol.pair_probabilities is not None:
            weights: dict[InputPair, float] = {}
            for key, value in protocol.pair_probabilities.items():
                try:
                    x, y = (int(part) for part in key.split(","))
                except ValueError:
                    raise ConfigurationError(f"bad pair key {key!r}, expected 'x,y'") from None
                weights[(x, y)] = value
            pairs = tuple(weights)
            probabilities = tuple(weights.values())
        else:
            entries: list[tuple[InputPair, float]] = []
            if test_pairs:
                share = protocol.test_fraction / len(test_pairs)
                entries += [(p, share) for p in test_pairs]
            if key_pairs:
                share = (1.0 - protocol.test_fraction) / len(key_pairs)
                entries += [(p, share) for p in key_pairs]
            entries = [(p, w) for p, w in entries if w > 0]
            pairs = tuple(p for p, _ in entries)
            probabilities = tuple(w for _, w in entries)

        return cls(
            pairs=pairs,
            probabilities=probabilities,
            test_pairs=frozenset(test_pairs),
            key_pairs=frozenset(key_pairs),
        )

    def round_type(self, x: int, y: int) -> RoundType:
        """Classify an input pair.

        Raises:
            ClassificationError: If the pair is neither a test nor a key pair.
        """
        if (x, y) in self.test_pairs:
            return RoundType.TEST
        if (x, y) in self.key_pairs:
            return RoundType.KEY
        raise ClassificationError(f"input pair ({x}, {y}) is neither a test nor a key pair")


@dataclass(frozen=True)
class ProtocolSetup:
    """Everything run_rounds needs: angles, input distribution, noise, CHSH roles."""

    angles: AngleMap
    distribution: InputDistribution
    noise: NoiseModel
    chsh_roles: ChshRoles = ChshRoles()

    @classmethod
    def from_config(cls, settings: Optional[Settings] = None) -> "ProtocolSetup":
        """Create a ProtocolSetup from app configuration."""
        settings = settings or get_settings()
        return cls(
            angles=AngleMap.from_config(settings.devices),
            distribution=InputDistribution.from_config(settings.protocol),
            noise=NoiseModel.from_config(settings.devices.noise),
            chsh_roles=ChshRoles(
                alice=tuple(settings.protocol.chsh_alice_inputs),
                bob=tuple(settings.protocol.chsh_bob_inputs),
            ),
        )

    def with_noise(self, noise: NoiseModel) -> "ProtocolSetup":
        """Copy with a different noise model."""
        return ProtocolSetup(self.angles, self.distribution, noise, self.chsh_roles)


class RoundTable:
    """Columnar container of protocol rounds.

    Attributes:
        index: 1-based round numbers.
        is_key: True for key rounds.
        x: Alice's inputs.
        y: Bob's inputs.
        a: Alice's outcomes.
        b: Bob's outcomes.
    """

    def __init__(
        self,
        index: np.ndarray,
        is_key: np.ndarray,
        x: np.ndarray,
        y: np.ndarray,
        a: np.ndarray,
        b: np.ndarray,
    ):
        self.index = np.asarray(index, dtype=np.int64)
        self.is_key = np.asarray(is_key, dtype=bool)
        self.x = np.asarray(x, dtype=np.int64)
        self.y = np.asarray(y, dtype=np.int64)
        self.a = np.asarray(a, dtype=np.int8)
        self.b = np.asarray(b, dtype=np.int8)

        n = self.index.size
        if any(col.size != n for col in (self.is_key, self.x, self.y, self.a, self.b)):
            raise ParameterError("round table columns differ in length")
        if n and not (np.isin(self.a, (-1, 1)).all() and np.isin(self.b, (-1, 1)).all()):
            raise ParameterError("outcomes must be +/-1")

    @classmethod
    def from_records(cls, records: Iterable[RoundRecord]) -> "RoundTable":
        """Build a table from RoundRecord values."""
        records = list(records)
        return cls(
            index=[r.index for r in records],
            is_key=[r.round_type is RoundType.KEY for r in records],
            x=[r.x for r in records],
            y=[r.y for r in records],
            a=[r.a for r in records],
            b=[r.b for r in records],
        )

    def __len__(self) -> int:
        return int(self.index.size)

    def __iter__(self) -> Iterator[RoundRecord]:
        for i in range(len(self)):
            yield self.record(i)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RoundTable):
            return NotImplemented
        return all(
            np.array_equal(getattr(self, col), getattr(other, col))
            for col in ("index", "is_key", "x", "y", "a", "b")
        )

    def record(self, row: int) -> RoundRecord:
        """RoundRecord at a row position."""
        return RoundRecord(
            index=int(self.index[row]),
            round_type=RoundType.KEY if self.is_key[row] else RoundType.TEST,
            x=int(self.x[row]),
            y=int(self.y[row]),
            a=int(self.a[row]),
            b=int(self.b[row]),
        )

    def select(self, rows: Union[np.ndarray, Sequence[int]]) -> "RoundTable":
        """Sub-table for a boolean mask or row positions."""
        rows = np.asarray(rows)
        return RoundTable(
            self.index[rows],
            self.is_key[rows],
            self.x[rows],
            self.y[rows],
            self.a[rows],
            self.b[rows],
        )

    def with_indices(self, round_indices: Iterable[int]) -> "RoundTable":
        """Sub-table holding the given round numbers, in table order."""
        return self.select(np.isin(self.index, np.fromiter(round_indices, dtype=np.int64)))

    def test_rounds(self) -> "RoundTable":
        return self.select(~self.is_key)

    def key_rounds(self) -> "RoundTable":
        return self.select(self.is_key)


def run_rounds(n_rounds: int, setup: ProtocolSetup, rng: np.random.Generator) -> RoundTable:
    """Run the measurement loop.

    Draws i.i.d. input pairs from the configured distribution and samples
    outcomes for each round.

    Args:
        n_rounds: Number of rounds (>= 1).
        setup: Angles, distribution and noise.
        rng: Generator for this run.

    Returns:
        RoundTable with rounds numbered 1..n_rounds.

    Raises:
        ParameterError: If n_rounds < 1.
    """
    if n_rounds < 1:
        raise ParameterError(f"n_rounds must be positive, got {n_rounds}")

    dist = setup.distribution
    choice = rng.choice(len(dist.pairs), size=n_rounds, p=np.asarray(dist.probabilities))
    pairs = np.asarray(dist.pairs, dtype=np.int64)
    x = pairs[choice, 0]
    y = pairs[choice, 1]
    key_lookup = np.array([p in dist.key_pairs for p in dist.pairs])
    is_key = key_lookup[choice]

    a, b = sample_outcomes(
        setup.angles.angles(Party.ALICE, x),
        setup.angles.angles(Party.BOB, y),
        setup.noise,
        is_key,
        rng,
    )
    logger.debug("rounds_generated", n_rounds=n_rounds, key_rounds=int(is_key.sum()))
    return RoundTable(np.arange(1, n_rounds + 1), is_key, x, y, a, b)


def classify_rounds(
    records: RoundTable, distribution: InputDistribution
) -> tuple[np.ndarray, np.ndarray]:
    """Partition rounds into test and key rounds from their input pairs.

    Args:
        records: Rounds to classify.
        distribution: Supplies the test and key pair sets.

    Returns:
        Tuple (test_indices, key_indices) of round numbers, ascending.

    Raises:
        ClassificationError: If a round's pair is in neither set.
    """
    if not len(records):
        empty = np.empty(0, dtype=np.int64)
        return empty, empty.copy()

    pairs, inverse = np.unique(
        np.stack([records.x, records.y], axis=1), axis=0, return_inverse=True
    )
    pair_is_test = np.array(
        [distribution.round_type(int(x), int(y)) is RoundType.TEST for x, y in pairs]
    )
    is_test = pair_is_test[inverse.reshape(-1)]
    return np.sort(records.index[is_test]), np.sort(records.index[~is_test])
