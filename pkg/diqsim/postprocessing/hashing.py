"""Toeplitz hashing for key verification and privacy amplification.

A Toeplitz matrix T (output_len x input_len) is fixed by input_len +
output_len - 1 seed bits, T[i][j] = seed[input_len - 1 + i - j]. The
product T.x mod 2 is one slice of the full convolution of seed and x,
which numpy computes in exact integer arithmetic.
"""

from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.linalg import toeplitz

from diqsim.bits import BitString
from diqsim.errors import ParameterError
from diqsim.utils.seeding import Stream, derive_rng


class HashFamily(str, Enum):
    TOEPLITZ = "toeplitz"


class VerificationResult(str, Enum):
    """Outcome of the key verification step."""

    MATCH = "match"
    MISMATCH = "mismatch"


@dataclass(frozen=True, eq=False)
class HashSpec:
    """One member of the Toeplitz family.

    Attributes:
        input_len: Key length the hash accepts.
        output_len: Digest length (<= input_len).
        seed: Seed bits, max(0, input_len + output_len - 1) of them.
        family: Hash family.
    """

    input_len: int
    output_len: int
    seed: np.ndarray = field(repr=False)
    family: HashFamily = HashFamily.TOEPLITZ

    def __post_init__(self):
        if self.input_len < 0 or self.output_len < 0:
            raise ParameterError("hash lengths must be non-negative")
        if self.output_len > self.input_len:
            raise ParameterError(
                f"output_len {self.output_len} exceeds input_len {self.input_len}"
            )
        seed = np.asarray(self.seed, dtype=np.uint8).reshape(-1)
        expected = self.seed_length(self.input_len, self.output_len)
        if seed.size != expected:
            raise ParameterError(f"seed has {seed.size} bits, expected {expected}")
        if seed.size and seed.max() > 1:
            raise ParameterError("seed must contain only 0 and 1")
        seed.setflags(write=False)
        object.__setattr__(self, "seed", seed)

    @staticmethod
    def seed_length(input_len: int, output_len: int) -> int:
        return max(0, input_len + output_len - 1)

    @classmethod
    def random(cls, input_len: int, output_len: int, rng: np.random.Generator) -> "HashSpec":
        """Spec with a uniformly random seed."""
        seed = rng.integers(0, 2, size=cls.seed_length(input_len, output_len), dtype=np.uint8)
        return cls(input_len, output_len, seed)

    def matrix(self) -> np.ndarray:
        """The explicit Toeplitz matrix (output_len x input_len)."""
        n, m = self.input_len, self.output_len
        if not m:
            return np.zeros((0, n), dtype=np.uint8)
        return toeplitz(self.seed[n - 1 :], self.seed[n - 1 :: -1])


def universal_hash(key: BitString, spec: HashSpec) -> BitString:
    """Hash a key with one member of the Toeplitz family.

    Raises:
        ParameterError: If the key length differs from spec.input_len.
    """
    n = len(key)
    if n != spec.input_len:
        raise ParameterError(f"key has {n} bits, hash expects {spec.input_len}")
    if not spec.output_len:
        return BitString.zeros(0)
    full = np.convolve(spec.seed.astype(np.int64), key.bits.astype(np.int64))
    return BitString((full[n - 1 : n - 1 + spec.output_len] & 1).astype(np.uint8))


def verify_keys(k_a: BitString, k_b: BitString, tag_bits: int, seed: int) -> VerificationResult:
    """Compare t-bit Toeplitz digests of two keys.

    Keys no longer than the tag are compared in full. Distinct longer keys
    collide with probability 2^-t over the seed.

    Args:
        k_a: Alice's key.
        k_b: Bob's key.
        tag_bits: Digest length t (>= 1).
        seed: Shared public seed selecting the hash.

    Raises:
        ParameterError: On a length mismatch or t < 1.
    """
    if len(k_a) != len(k_b):
        raise ParameterError(f"length mismatch: {len(k_a)} vs {len(k_b)}")
    if tag_bits < 1:
        raise ParameterError(f"tag_bits must be positive, got {tag_bits}")
    if len(k_a) <= tag_bits:
        digest_a, digest_b = k_a, k_b
    else:
        spec = HashSpec.random(len(k_a), tag_bits, derive_rng(seed, Stream.HASH))
        digest_a, digest_b = universal_hash(k_a, spec), universal_hash(k_b, spec)
    return VerificationResult.MATCH if digest_a == digest_b else VerificationResult.MISMATCH


def privacy_amplify(
    key: BitString, output_len: int, rng: np.random.Generator
) -> tuple[BitString, HashSpec]:
    """Compress a reconciled key to output_len bits with a fresh random hash."""
    spec = HashSpec.random(len(key), output_len, rng)
    return universal_hash(key, spec), spec
