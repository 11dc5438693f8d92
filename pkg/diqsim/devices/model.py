"""Black-box measurement statistics.

Outcome pairs are drawn from two-outcome projective statistics on a
visibility-v entangled state: the ideal correlator is E = v*cos(2*dtheta)
and the joint law is P(a, b) = (1 + a*b*E) / 4. Two classical channels
follow: a symmetric bit flip on both outcomes in every round and a readout
error that only acts in key rounds.

Each sample consumes exactly six uniforms, in this order:
    0: Alice's outcome, 1: Bob's agreement with it,
    2-3: bit flips (Alice, Bob), 4-5: key readout errors (Alice, Bob).
The readout uniforms are drawn in test rounds too so that draw counts do
not depend on the round type.
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from diqsim.config import NoiseConfig, get_settings
from diqsim.errors import ParameterError

DRAWS_PER_SAMPLE = 6


class Party(str, Enum):
    """Protocol participants."""

    ALICE = "alice"
    BOB = "bob"


@dataclass(frozen=True)
class MeasurementSetting:
    """One measurement input of one party.

    Attributes:
        party: Who measures.
        input_index: Input label (x for Alice, y for Bob).
        angle: Measurement angle in degrees, in [-90, 90).
    """

    party: Party
    input_index: int
    angle: float

    def __post_init__(self):
        if self.input_index < 0:
            raise ParameterError(f"input index {self.input_index} is negative")
        if not -90.0 <= self.angle < 90.0:
            raise ParameterError(f"angle {self.angle} outside [-90, 90)")


@dataclass(frozen=True)
class NoiseModel:
    """Noise acting on the ideal statistics.

    Attributes:
        visibility: Multiplicative degradation of the ideal correlation.
        bitflip_prob: Independent flip probability per outcome, all rounds.
        key_readout_error: Independent flip probability per outcome, key rounds only.
    """

    visibility: float = 1.0
    bitflip_prob: float = 0.0
    key_readout_error: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.visibility <= 1.0:
            raise ParameterError(f"visibility {self.visibility} outside [0, 1]")
        if not 0.0 <= self.bitflip_prob <= 1.0:
            raise ParameterError(f"bitflip_prob {self.bitflip_prob} outside [0, 1]")
        if not 0.0 <= self.key_readout_error <= 0.5:
            raise ParameterError(f"key_readout_error {self.key_readout_error} outside [0, 0.5]")

    @classmethod
    def ideal(cls) -> "NoiseModel":
        """Noiseless, perfectly entangled statistics."""
        return cls()

    @classmethod
    def from_config(cls, noise: Optional[NoiseConfig] = None) -> "NoiseModel":
        """Create a NoiseModel from the devices.noise config section."""
        noise = noise or get_settings().devices.noise
        return cls(
            visibility=noise.visibility,
            bitflip_prob=noise.bitflip_prob,
            key_readout_error=noise.key_readout_error,
        )

    def with_bitflip(self, p: float) -> "NoiseModel":
        """Copy with a different bit-flip probability."""
        return NoiseModel(self.visibility, p, self.key_readout_error)

    def damping(self, is_key_round: bool) -> float:
        """Factor multiplying the ideal correlator."""
        factor = self.visibility * (1.0 - 2.0 * self.bitflip_prob) ** 2
        if is_key_round:
            factor *= (1.0 - 2.0 * self.key_readout_error) ** 2
        return factor


@dataclass(frozen=True)
class OutcomePair:
    """Outcomes of one round, each in {-1, +1}."""

    a: int
    b: int

    def __post_init__(self):
        if self.a not in (-1, 1) or self.b not in (-1, 1):
            raise ParameterError(f"outcomes must be +/-1, got ({self.a}, {self.b})")

    @property
    def product(self) -> int:
        return self.a * self.b


def ideal_correlator(angle_a: float, angle_b: float, visibility: float = 1.0) -> float:
    """v * cos(2 * (theta_A - theta_B)) for angles in degrees."""
    return visibility * math.cos(2.0 * math.radians(angle_a - angle_b))


def correlator(
    setting_a: MeasurementSetting,
    setting_b: MeasurementSetting,
    noise: NoiseModel,
    is_key_round: bool,
) -> float:
    """Expected product of outcomes for a setting pair.

    Args:
        setting_a: Alice's setting.
        setting_b: Bob's setting.
        noise: Noise model.
        is_key_round: Whether key readout error applies.

    Returns:
        Correlator in [-1, 1].
    """
    ideal = math.cos(2.0 * math.radians(setting_a.angle - setting_b.angle))
    return ideal * noise.damping(is_key_round)


def _flip(pair: OutcomePair, p: float, u_a: float, u_b: float) -> OutcomePair:
    return OutcomePair(-pair.a if u_a < p else pair.a, -pair.b if u_b < p else pair.b)


def apply_bitflip(pair: OutcomePair, p: float, rng: np.random.Generator) -> OutcomePair:
    """Negate each outcome independently with probability p.

    Args:
        pair: Input outcomes.
        p: Flip probability in [0, 1].
        rng: Generator; two uniforms are consumed.

    Returns:
        Possibly flipped outcomes.
    """
    if not 0.0 <= p <= 1.0:
        raise ParameterError(f"flip probability {p} outside [0, 1]")
    u_a, u_b = rng.random(2)
    return _flip(pair, p, u_a, u_b)


def sample_outcome_pair(
    setting_a: MeasurementSetting,
    setting_b: MeasurementSetting,
    noise: NoiseModel,
    is_key_round: bool,
    rng: np.random.Generator,
) -> OutcomePair:
    """Draw one outcome pair.

    Fuses entanglement generation, ideal measurement and readout noise into
    a single step of DRAWS_PER_SAMPLE uniforms.

    Args:
        setting_a: Alice's setting.
        setting_b: Bob's setting.
        noise: Noise model.
        is_key_round: Whether key readout error applies.
        rng: Generator.

    Returns:
        Sampled outcomes.
    """
    u = rng.random(DRAWS_PER_SAMPLE)
    e_ideal = ideal_correlator(setting_a.angle, setting_b.angle, noise.visibility)
    a = 1 if u[0] < 0.5 else -1
    b = a if u[1] < (1.0 + e_ideal) / 2.0 else -a
    pair = _flip(OutcomePair(a, b), noise.bitflip_prob, u[2], u[3])
    if is_key_round:
        pair = _flip(pair, noise.key_readout_error, u[4], u[5])
    return pair


def sample_outcomes(
    angles_a: np.ndarray,
    angles_b: np.ndarray,
    noise: NoiseModel,
    key_mask: np.ndarray,
    rng: np.random.Generator,
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised sample_outcome_pair.

    Row i consumes the same uniforms that the i-th sequential call of
    sample_outcome_pair would, so both paths agree for a given generator state.

    Args:
        angles_a: Alice's angles per round (degrees).
        angles_b: Bob's angles per round (degrees).
        noise: Noise model.
        key_mask: True where the round is a key round.
        rng: Generator.

    Returns:
        Tuple (a, b) of int8 arrays with values in {-1, +1}.
    """
    n = len(angles_a)
    u = rng.random((n, DRAWS_PER_SAMPLE))
    delta = np.radians(np.asarray(angles_a) - np.asarray(angles_b))
    e_ideal = noise.visibility * np.cos(2.0 * delta)
    a = np.where(u[:, 0] < 0.5, 1, -1).astype(np.int8)
    b = np.where(u[:, 1] < (1.0 + e_ideal) / 2.0, a, -a).astype(np.int8)
    a = np.where(u[:, 2] < noise.bitflip_prob, -a, a)
    b = np.where(u[:, 3] < noise.bitflip_prob, -b, b)
    key_mask = np.asarray(key_mask, dtype=bool)
    a = np.where(key_mask & (u[:, 4] < noise.key_readout_error), -a, a)
    b = np.where(key_mask & (u[:, 5] < noise.key_readout_error), -b, b)
    return a.astype(np.int8), b.astype(np.int8)
