"""Configuration management for diqsim.

Loads configuration from YAML files and environment variables using Pydantic.
Environment variables use the ``DIQSIM_`` prefix and ``__`` as the nested
delimiter, e.g. ``DIQSIM_EXPERIMENT__OUTPUT_DIR=/tmp/results``.
"""

import math
from pathlib import Path
from typing import Optional

import yaml
from pydantic import BaseModel, Field, ValidationError, field_validator, model_validator
from pydantic_settings import (
    BaseSettings,
    DotEnvSettingsSource,
    EnvSettingsSource,
    SettingsConfigDict,
)

from diqsim.errors import ConfigurationError

TSIRELSON_BOUND = 2.0 * math.sqrt(2.0)


def _default_noise_grid() -> list[float]:
    return [round(i * 0.01, 2) for i in range(101)]


class AppConfig(BaseModel):
    """Application settings."""

    name: str = "diqsim"
    log_level: str = "INFO"
    json_logs: bool = False


class NoiseConfig(BaseModel):
    """Device noise parameters (see devices.model.NoiseModel)."""

    visibility: float = Field(0.9115, ge=0.0, le=1.0)
    bitflip_prob: float = Field(0.0, ge=0.0, le=1.0)
    key_readout_error: float = Field(0.0189, ge=0.0, le=0.5)


class DevicesConfig(BaseModel):
    """Measurement angles per input index, in degrees."""

    alice_angles: dict[int, float] = Field(
        default_factory=lambda: {0: -22.5, 1: 22.5, 2: -45.0, 3: 0.0}
    )
    bob_angles: dict[int, float] = Field(default_factory=lambda: {0: -22.5, 1: 22.5})
    noise: NoiseConfig = Field(default_factory=NoiseConfig)

    @field_validator("alice_angles", "bob_angles")
    @classmethod
    def _check_angles(cls, angles: dict[int, float]) -> dict[int, float]:
        if not angles:
            raise ValueError("input alphabet must not be empty")
        for index, angle in angles.items():
            if index < 0:
                raise ValueError(f"input index {index} is negative")
            if not -90.0 <= angle < 90.0:
                raise ValueError(f"angle {angle} for input {index} outside [-90, 90)")
        return angles


class ProtocolConfig(BaseModel):
    """Round partitioning, input distribution and abort rules."""

    test_pairs: list[tuple[int, int]] = Field(
        default_factory=lambda: [(3, 0), (3, 1), (2, 0), (2, 1)]
    )
    key_pairs: list[tuple[int, int]] = Field(default_factory=lambda: [(0, 0), (1, 1)])
    test_fraction: float = Field(0.5, ge=0.0, le=1.0)
    # Explicit per-pair probabilities keyed "x,y"; overrides test_fraction.
    pair_probabilities: Optional[dict[str, float]] = None
    chsh_alice_inputs: tuple[int, int] = (3, 2)
    chsh_bob_inputs: tuple[int, int] = (0, 1)
    s_threshold: float = 2.0
    qber_abort_enabled: bool = False
    qber_threshold: float = Field(0.082, gt=0.0, le=0.5)

    @model_validator(mode="after")
    def _check_pairs(self) -> "ProtocolConfig":
        overlap = set(self.test_pairs) & set(self.key_pairs)
        if overlap:
            raise ValueError(f"pairs {sorted(overlap)} are both test and key pairs")
        return self


class CascadeConfig(BaseModel):
    """Reconciliation settings."""

    passes: int = Field(4, ge=1)
    heatmap_passes: int = Field(20, ge=1)
    # Fraction of sifted bits disclosed to estimate the QBER for the block schedule.
    # 1.0 uses the exact sifted-key QBER without removing bits.
    qber_sample_fraction: float = Field(1.0, gt=0.0, le=1.0)


class PostprocessingConfig(BaseModel):
    """Verification and privacy amplification settings."""

    eps_cor: float = Field(2.0**-64, gt=0.0, lt=1.0)
    eps_sec: float = Field(2.0**-64, gt=0.0, lt=1.0)
    security_margin_bits: int = Field(100, ge=0)
    use_measured_leakage: bool = True

    @property
    def tag_bits(self) -> int:
        """Verification digest length implied by eps_cor."""
        return max(1, math.ceil(-math.log2(self.eps_cor)))

    @property
    def margin_bits(self) -> int:
        """Security margin, never below log2(1/eps_sec)."""
        return max(self.security_margin_bits, math.ceil(-math.log2(self.eps_sec)))


class ExperimentConfig(BaseModel):
    """Experiment harness settings."""

    n_rounds: int = Field(10_000, ge=1)
    repetitions: int = Field(50, ge=1)
    root_seed: int = Field(0, ge=0, lt=2**64)
    noise_grid: list[float] = Field(default_factory=_default_noise_grid)
    heatmap_grid: list[float] = Field(
        default_factory=lambda: [0.0, 0.005, 0.01, 0.02, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5]
    )
    heatmap_length: int = Field(10_000, ge=1)
    output_dir: Path = Path("results")
    workers: int = Field(1, ge=1)

    @field_validator("noise_grid", "heatmap_grid")
    @classmethod
    def _check_grid(cls, grid: list[float]) -> list[float]:
        if any(not 0.0 <= p <= 1.0 for p in grid):
            raise ValueError("grid values must lie in [0, 1]")
        if any(b < a for a, b in zip(grid, grid[1:])):
            raise ValueError("grid values must be sorted")
        return grid


class Settings(BaseSettings):
    """Main settings class that loads from YAML and environment."""

    model_config = SettingsConfigDict(
        env_prefix="DIQSIM_",
        env_nested_delimiter="__",
        env_file=".env",
        extra="ignore",
    )

    app: AppConfig = Field(default_factory=AppConfig)
    devices: DevicesConfig = Field(default_factory=DevicesConfig)
    protocol: ProtocolConfig = Field(default_factory=ProtocolConfig)
    cascade: CascadeConfig = Field(default_factory=CascadeConfig)
    postprocessing: PostprocessingConfig = Field(default_factory=PostprocessingConfig)
    experiment: ExperimentConfig = Field(default_factory=ExperimentConfig)

    @classmethod
    def load(cls, config_path: Optional[Path] = None) -> "Settings":
        """Load settings from a YAML file.

        Args:
            config_path: Path to config file. If None, uses default paths.

        Returns:
            Settings instance with loaded configuration.

        Raises:
            ConfigurationError: If an explicit path is missing or the content is invalid.
        """
        default_paths = [
            Path("config/config.yaml"),
            Path("config/default_config.yaml"),
            Path.home() / ".config" / "diqsim" / "config.yaml",
        ]

        if config_path is not None:
            if not config_path.exists():
                raise ConfigurationError(f"Config file not found: {config_path}")
            yaml_path: Optional[Path] = config_path
        else:
            yaml_path = next((p for p in default_paths if p.exists()), None)

        yaml_config: dict = {}
        if yaml_path:
            try:
                with open(yaml_path) as f:
                    yaml_config = yaml.safe_load(f) or {}
            except yaml.YAMLError as e:
                raise ConfigurationError(f"Cannot parse {yaml_path}: {e}") from e

        # YAML < .env < environment
        merged = yaml_config
        for source in (DotEnvSettingsSource(cls), EnvSettingsSource(cls)):
            merged = _deep_merge(merged, source())

        try:
            return cls(**merged)
        except ValidationError as e:
            raise ConfigurationError(f"Invalid configuration in {yaml_path}: {e}") from e

    def get_output_path(self, name: str) -> Path:
        """Get path of an output file inside the output directory."""
        return Path(self.experiment.output_dir) / name


def _deep_merge(base: dict, override: dict) -> dict:
    merged = dict(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _deep_merge(merged[key], value)
        else:
            merged[key] = value
    return merged


_settings: Optional[Settings] = None


def get_settings() -> Settings:
    """Get the global settings instance.

    Returns:
        Settings instance (creates one if not exists).
    """
    global _settings
    if _settings is None:
        _settings = Settings.load()
    return _settings


def reload_settings(config_path: Optional[Path] = None) -> Settings:
    """Reload settings from disk.

    Args:
        config_path: Optional path to config file.

    Returns:
        New settings instance.
    """
    global _settings
    _settings = Settings.load(config_path)
    return _settings
