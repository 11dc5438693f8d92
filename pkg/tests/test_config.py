"""Unit tests for configuration loading."""

from pathlib import Path

import pytest
from pydantic import ValidationError

from diqsim.config import (
    ExperimentConfig,
    PostprocessingConfig,
    ProtocolConfig,
    Settings,
    reload_settings,
)
from diqsim.errors import ConfigurationError
from diqsim.protocol import InputDistribution, ProtocolSetup

from .conftest import DEFAULT_CONFIG, WORKED_EXAMPLE_CONFIG


class TestSettings:
    """Tests for Settings defaults and loading."""

    def test_defaults(self):
        settings = Settings()
        assert settings.devices.noise.visibility == pytest.approx(0.9115)
        assert settings.devices.noise.key_readout_error == pytest.approx(0.0189)
        assert settings.cascade.passes == 4
        assert settings.postprocessing.tag_bits == 64
        assert settings.postprocessing.margin_bits == 100
        assert len(settings.experiment.noise_grid) == 101

    def test_load_default_file(self):
        settings = Settings.load(DEFAULT_CONFIG)
        assert settings.protocol.chsh_alice_inputs == (3, 2)
        assert settings.postprocessing.tag_bits == 64
        assert settings.experiment.heatmap_grid[-1] == 0.5

    def test_load_worked_example_file(self):
        settings = Settings.load(WORKED_EXAMPLE_CONFIG)
        dist = InputDistribution.from_config(settings.protocol)
        assert dist.key_pairs == frozenset({(0, 2)})
        assert dict(zip(dist.pairs, dist.probabilities))[(0, 2)] == 0.5
        assert ProtocolSetup.from_config(settings).angles.bob[2] == 0.0

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigurationError):
            Settings.load(tmp_path / "nope.yaml")

    def test_invalid_content(self, tmp_path):
        path = tmp_path / "bad.yaml"
        path.write_text("devices:\n  alice_angles:\n    0: 120.0\n")
        with pytest.raises(ConfigurationError):
            Settings.load(path)

    def test_unparseable_yaml(self, tmp_path):
        path = tmp_path / "broken.yaml"
        path.write_text("protocol: [unclosed\n")
        with pytest.raises(ConfigurationError):
            Settings.load(path)

    def test_env_overrides_output_dir(self, tmp_path, monkeypatch):
        monkeypatch.setenv("DIQSIM_EXPERIMENT__OUTPUT_DIR", str(tmp_path))
        settings = Settings.load(DEFAULT_CONFIG)
        assert Path(settings.experiment.output_dir) == tmp_path
        assert settings.experiment.n_rounds == 10_000

    def test_env_overrides_yaml_values(self, monkeypatch):
        monkeypatch.setenv("DIQSIM_DEVICES__NOISE__BITFLIP_PROB", "0.05")
        monkeypatch.setenv("DIQSIM_EXPERIMENT__N_ROUNDS", "123")
        settings = Settings.load(DEFAULT_CONFIG)
        assert settings.devices.noise.bitflip_prob == pytest.approx(0.05)
        assert settings.experiment.n_rounds == 123
        assert settings.devices.noise.visibility == pytest.approx(0.9115)
        assert settings.experiment.repetitions == 50

    def test_dotenv_below_environment(self, tmp_path, monkeypatch):
        monkeypatch.chdir(tmp_path)
        (tmp_path / ".env").write_text(
            "DIQSIM_EXPERIMENT__N_ROUNDS=321\nDIQSIM_EXPERIMENT__REPETITIONS=7\n"
        )
        monkeypatch.setenv("DIQSIM_EXPERIMENT__REPETITIONS", "9")
        settings = Settings.load(DEFAULT_CONFIG)
        assert settings.experiment.n_rounds == 321
        assert settings.experiment.repetitions == 9

    def test_reload(self):
        assert reload_settings(DEFAULT_CONFIG).experiment.repetitions == 50

    def test_output_path(self, tmp_path):
        settings = Settings(experiment=ExperimentConfig(output_dir=tmp_path))
        assert settings.get_output_path("sweep.csv") == tmp_path / "sweep.csv"


class TestSectionValidation:
    """Tests for per-section validators."""

    def test_overlapping_pairs(self):
        with pytest.raises(ValidationError):
            ProtocolConfig(test_pairs=[(0, 0)], key_pairs=[(0, 0)])

    def test_unsorted_grid(self):
        with pytest.raises(ValidationError):
            ExperimentConfig(noise_grid=[0.2, 0.1])

    def test_grid_range(self):
        with pytest.raises(ValidationError):
            ExperimentConfig(heatmap_grid=[0.0, 1.5])

    def test_tag_bits_from_eps(self):
        assert PostprocessingConfig(eps_cor=2.0**-32).tag_bits == 32

    def test_margin_never_below_eps_sec(self):
        config = PostprocessingConfig(eps_sec=2.0**-128, security_margin_bits=10)
        assert config.margin_bits == 128
