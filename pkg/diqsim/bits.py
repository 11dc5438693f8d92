"""Bit string type shared by sifting, reconciliation and hashing.

BitString wraps a read-only numpy uint8 array of 0/1 values. Operations
that change bits return a new instance, so a key handed to Cascade or a
hash function can never be modified behind the caller's back.
"""

from typing import Iterable, Iterator, Union

import numpy as np


class BitString:
    """Ordered sequence of bits.

    Attributes:
        bits: Read-only uint8 array of 0/1 values.
    """

    __slots__ = ("_bits",)

    def __init__(self, bits: Union[np.ndarray, Iterable[int]] = ()):
        """Initialize from an array or iterable of 0/1 values.

        Args:
            bits: Bit values.

        Raises:
            ValueError: If any value is not 0 or 1.
        """
        array = np.array(bits, dtype=np.uint8).reshape(-1)
        if array.size and array.max() > 1:
            raise ValueError("BitString values must be 0 or 1")
        array.setflags(write=False)
        self._bits = array

    @classmethod
    def from_str(cls, text: str) -> "BitString":
        """Parse a string of '0'/'1' characters (whitespace ignored)."""
        cleaned = "".join(text.split())
        if any(ch not in "01" for ch in cleaned):
            raise ValueError(f"Invalid bit string: {text!r}")
        return cls(np.frombuffer(cleaned.encode("ascii"), dtype=np.uint8) - ord("0"))

    @classmethod
    def zeros(cls, length: int) -> "BitString":
        """All-zero string of the given length."""
        return cls(np.zeros(length, dtype=np.uint8))

    @classmethod
    def random(cls, length: int, rng: np.random.Generator) -> "BitString":
        """Uniformly random string drawn from rng."""
        return cls(rng.integers(0, 2, size=length, dtype=np.uint8))

    @property
    def bits(self) -> np.ndarray:
        """Read-only view of the underlying bits."""
        return self._bits

    def __len__(self) -> int:
        return int(self._bits.size)

    def __getitem__(self, position: int) -> int:
        return int(self._bits[position])

    def __iter__(self) -> Iterator[int]:
        return (int(b) for b in self._bits)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BitString):
            return NotImplemented
        return np.array_equal(self._bits, other._bits)

    def __hash__(self) -> int:
        return hash(self._bits.tobytes())

    def __repr__(self) -> str:
        preview = self.to_str()
        if len(preview) > 32:
            preview = preview[:32] + "..."
        return f"BitString(len={len(self)}, bits={preview})"

    def to_str(self) -> str:
        """Render as a string of '0'/'1' characters."""
        return (self._bits + ord("0")).tobytes().decode("ascii")

    def flip(self, *positions: int) -> "BitString":
        """Return a copy with the given positions inverted."""
        array = self._bits.copy()
        for position in positions:
            array[position] ^= 1
        return BitString(array)

    def xor(self, other: "BitString") -> "BitString":
        """Bitwise XOR with an equal-length string."""
        self._require_same_length(other)
        return BitString(self._bits ^ other._bits)

    def hamming(self, other: "BitString") -> int:
        """Number of positions where the strings differ."""
        self._require_same_length(other)
        return int(np.count_nonzero(self._bits != other._bits))

    def diff_positions(self, other: "BitString") -> list[int]:
        """Positions where the strings differ, ascending."""
        self._require_same_length(other)
        return [int(p) for p in np.flatnonzero(self._bits != other._bits)]

    def parity(self) -> int:
        """XOR of all bits."""
        return int(self._bits.sum() & 1)

    def _require_same_length(self, other: "BitString") -> None:
        if len(self) != len(other):
            raise ValueError(f"Length mismatch: {len(self)} != {len(other)}")
