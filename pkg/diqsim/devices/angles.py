"""Input-to-angle maps for both parties."""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from diqsim.config import DevicesConfig, get_settings
from diqsim.devices.model import MeasurementSetting, Party
from diqsim.errors import ConfigurationError


@dataclass(frozen=True)
class AngleMap:
    """Measurement settings of Alice and Bob, keyed by input index.

    Attributes:
        alice: Alice's input index -> angle (degrees).
        bob: Bob's input index -> angle (degrees).
    """

    alice: dict[int, float]
    bob: dict[int, float]
    _settings: dict[tuple[Party, int], MeasurementSetting] = field(
        default_factory=dict, init=False, repr=False, compare=False
    )

    def __post_init__(self):
        if not self.alice or not self.bob:
            raise ConfigurationError("both input alphabets must be non-empty")
        for party, angles in ((Party.ALICE, self.alice), (Party.BOB, self.bob)):
            for index, angle in angles.items():
                self._settings[(party, index)] = MeasurementSetting(party, index, angle)

    @classmethod
    def from_config(cls, devices: Optional[DevicesConfig] = None) -> "AngleMap":
        """Create an AngleMap from the devices config section."""
        devices = devices or get_settings().devices
        return cls(alice=dict(devices.alice_angles), bob=dict(devices.bob_angles))

    def setting(self, party: Party, input_index: int) -> MeasurementSetting:
        """Look up one setting.

        Raises:
            ConfigurationError: If the input is not in the party's alphabet.
        """
        try:
            return self._settings[(party, input_index)]
        except KeyError:
            raise ConfigurationError(
                f"input {input_index} not in {party.value}'s alphabet"
            ) from None

    def angles(self, party: Party, inputs: np.ndarray) -> np.ndarray:
        """Vectorised angle lookup for an array of inputs."""
        table = self.alice if party is Party.ALICE else self.bob
        lookup = np.full(max(table) + 1, np.nan)
        for index, angle in table.items():
            lookup[index] = angle
        inputs = np.asarray(inputs, dtype=np.int64)
        if inputs.size and (
            inputs.min() < 0 or inputs.max() >= lookup.size or np.isnan(lookup[inputs]).any()
        ):
            raise ConfigurationError(f"inputs outside {party.value}'s alphabet")
        return lookup[inputs]
