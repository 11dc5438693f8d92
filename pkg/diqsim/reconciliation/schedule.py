"""Cascade pass plans and the block-size schedule."""

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from diqsim.errors import ParameterError, PlanError

# k1 = ceil(INITIAL_BLOCK_FACTOR / Q)
INITIAL_BLOCK_FACTOR = 0.73


@dataclass(frozen=True, eq=False)
class PassPlan:
    """Block structure of one Cascade pass.

    The shuffle lists positions in pass order; block j is the j-th run of
    block_size entries (the last block may be shorter).

    Attributes:
        pass_index: 1-based pass number.
        block_size: Nominal block size k_i.
        shuffle: Permutation of 0..n-1, slot -> position.
    """

    pass_index: int
    block_size: int
    shuffle: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.pass_index < 1:
            raise PlanError(f"pass_index must be positive, got {self.pass_index}")
        if self.block_size < 1:
            raise PlanError(f"block_size must be positive, got {self.block_size}")
        shuffle = np.array(self.shuffle, dtype=np.int64).reshape(-1)
        if not np.array_equal(np.sort(shuffle), np.arange(shuffle.size)):
            raise PlanError(f"pass {self.pass_index} shuffle is not a permutation")
        shuffle.setflags(write=False)
        object.__setattr__(self, "shuffle", shuffle)

    @classmethod
    def identity(cls, pass_index: int, block_size: int, n: int) -> "PassPlan":
        """Plan with contiguous blocks."""
        return cls(pass_index, block_size, np.arange(n))

    @classmethod
    def from_blocks(cls, pass_index: int, blocks: Sequence[Sequence[int]]) -> "PassPlan":
        """Plan from explicit blocks; all but the last must share one size."""
        if not blocks:
            return cls(pass_index, 1, np.empty(0, dtype=np.int64))
        size = len(blocks[0])
        if any(len(b) != size for b in blocks[:-1]) or len(blocks[-1]) > size:
            raise PlanError("explicit blocks must have equal size (last may be shorter)")
        return cls(pass_index, size, np.concatenate([np.asarray(b) for b in blocks]))

    @property
    def n(self) -> int:
        return int(self.shuffle.size)

    @property
    def n_blocks(self) -> int:
        return math.ceil(self.n / self.block_size)

    def blocks(self) -> list[np.ndarray]:
        """Positions of every block, in pass order."""
        k = self.block_size
        return [self.shuffle[s : s + k] for s in range(0, self.n, k)]

    def block_of(self) -> np.ndarray:
        """Map position -> block index."""
        owner = np.empty(self.n, dtype=np.int64)
        owner[self.shuffle] = np.arange(self.n) // self.block_size
        return owner

    def block_parities(self, bits: np.ndarray) -> np.ndarray:
        """Parity of every block of a bit array."""
        if not self.n:
            return np.empty(0, dtype=np.uint8)
        starts = np.arange(0, self.n, self.block_size)
        sums = np.add.reduceat(np.asarray(bits, dtype=np.int64)[self.shuffle], starts)
        return (sums & 1).astype(np.uint8)


def block_schedule(qber_estimate: float, n: int, passes: int) -> list[int]:
    """Classic Cascade block sizes.

    k1 = ceil(0.73 / Q) clamped to [2, ceil(n/2)], then k_{i+1} = min(2 * k_i, n).
    Q = 0 takes the clamp ceiling.

    Args:
        qber_estimate: Estimated error rate in [0, 0.5].
        n: String length (>= 1).
        passes: Number of passes (>= 1).

    Returns:
        List of `passes` block sizes.

    Raises:
        ParameterError: On out-of-range arguments.
    """
    if passes < 1:
        raise ParameterError(f"passes must be positive, got {passes}")
    if n < 1:
        raise ParameterError(f"n must be positive, got {n}")
    if not 0.0 <= qber_estimate <= 0.5:
        raise ParameterError(f"qber_estimate {qber_estimate} outside [0, 0.5]")

    ceiling = max(1, math.ceil(n / 2))
    if qber_estimate == 0.0:
        first = ceiling
    else:
        # rounding keeps e.g. 0.73 / 0.073 from landing just above 10
        first = min(max(math.ceil(round(INITIAL_BLOCK_FACTOR / qber_estimate, 9)), 2), ceiling)

    sizes = [first]
    for _ in range(passes - 1):
        sizes.append(min(2 * sizes[-1], n))
    return sizes


def make_pass_plans(
    block_sizes: Sequence[int], n: int, rng: np.random.Generator
) -> list[PassPlan]:
    """Pass plans for a schedule: identity first pass, seeded permutations after."""
    plans = []
    for i, size in enumerate(block_sizes, start=1):
        if i == 1:
            plans.append(PassPlan.identity(i, size, n))
        else:
            plans.append(PassPlan(i, size, rng.permutation(n)))
    return plans
