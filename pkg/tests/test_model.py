"""Unit tests for the device statistics model."""

import math

import numpy as np
import pytest

from diqsim.config import NoiseConfig
from diqsim.devices import (
    AngleMap,
    MeasurementSetting,
    NoiseModel,
    OutcomePair,
    Party,
    apply_bitflip,
    correlator,
    sample_outcome_pair,
    sample_outcomes,
)
from diqsim.devices.model import ideal_correlator
from diqsim.errors import ConfigurationError, ParameterError
from diqsim.utils.seeding import derive_rng


def setting(party: Party, angle: float, index: int = 0) -> MeasurementSetting:
    return MeasurementSetting(party, index, angle)


class TestCorrelator:
    """Tests for the expected outcome product."""

    def test_ideal_correlator_aligned(self):
        """Aligned settings are perfectly correlated."""
        assert ideal_correlator(10.0, 10.0) == pytest.approx(1.0)

    def test_ideal_correlator_chsh_angle(self):
        """A 22.5 degree offset gives cos(45)."""
        assert ideal_correlator(0.0, -22.5) == pytest.approx(math.sqrt(0.5))

    def test_visibility_scales(self):
        """Visibility multiplies the correlator."""
        noise = NoiseModel(visibility=0.5)
        e = correlator(setting(Party.ALICE, 0.0), setting(Party.BOB, 0.0), noise, False)
        assert e == pytest.approx(0.5)

    def test_bitflip_damping(self):
        """Bit flips on both sides damp by (1 - 2p)^2."""
        noise = NoiseModel(bitflip_prob=0.1)
        e = correlator(setting(Party.ALICE, 0.0), setting(Party.BOB, 0.0), noise, False)
        assert e == pytest.approx(0.64)

    def test_readout_error_only_in_key_rounds(self):
        """Key readout error leaves test rounds untouched."""
        noise = NoiseModel(key_readout_error=0.1)
        a, b = setting(Party.ALICE, 0.0), setting(Party.BOB, 0.0)
        assert correlator(a, b, noise, False) == pytest.approx(1.0)
        assert correlator(a, b, noise, True) == pytest.approx(0.64)

    def test_calibrated_defaults(self):
        """The shipped noise gives S = 2.578 and key QBER = 0.078."""
        noise = NoiseModel.from_config(NoiseConfig())
        s = 4 * math.sqrt(0.5) * noise.damping(False)
        qber = (1 - noise.damping(True)) / 2
        assert s == pytest.approx(2.578, abs=5e-4)
        assert qber == pytest.approx(0.078, abs=5e-4)


class TestValidation:
    """Tests for parameter checks."""

    def test_angle_out_of_range(self):
        with pytest.raises(ParameterError):
            MeasurementSetting(Party.ALICE, 0, 90.0)

    def test_negative_input(self):
        with pytest.raises(ParameterError):
            MeasurementSetting(Party.BOB, -1, 0.0)

    def test_visibility_out_of_range(self):
        with pytest.raises(ParameterError):
            NoiseModel(visibility=1.5)

    def test_outcome_values(self):
        with pytest.raises(ParameterError):
            OutcomePair(0, 1)

    def test_bitflip_probability_range(self, rng):
        with pytest.raises(ParameterError):
            apply_bitflip(OutcomePair(1, 1), 1.5, rng)


class TestSampling:
    """Tests for outcome sampling."""

    def test_bitflip_extremes(self, rng):
        """p=0 keeps and p=1 negates both outcomes."""
        assert apply_bitflip(OutcomePair(1, -1), 0.0, rng) == OutcomePair(1, -1)
        assert apply_bitflip(OutcomePair(1, -1), 1.0, rng) == OutcomePair(-1, 1)

    def test_aligned_ideal_outcomes_agree(self, rng):
        """Ideal aligned settings always give equal outcomes."""
        a, b = sample_outcomes(
            np.zeros(1000), np.zeros(1000), NoiseModel.ideal(), np.zeros(1000, bool), rng
        )
        assert np.array_equal(a, b)

    def test_orthogonal_correlator_vanishes(self):
        """A 45 degree offset gives a mean product near zero."""
        n = 20000
        a, b = sample_outcomes(
            np.zeros(n), np.full(n, 45.0), NoiseModel.ideal(), np.zeros(n, bool), derive_rng(3)
        )
        assert abs(np.mean(a.astype(int) * b)) < 4 / math.sqrt(n)

    def test_alice_marginal_is_uniform(self):
        """Alice's outcome is +1 half of the time."""
        n = 20000
        a, _ = sample_outcomes(
            np.zeros(n), np.zeros(n), NoiseModel(0.9), np.ones(n, bool), derive_rng(4)
        )
        assert abs(np.mean(a == 1) - 0.5) < 4 * 0.5 / math.sqrt(n)

    def test_both_marginals_unbiased_under_noise(self):
        n = 40000
        noise = NoiseModel(visibility=0.9115, bitflip_prob=0.1, key_readout_error=0.0189)
        key_mask = np.arange(n) % 2 == 0
        a, b = sample_outcomes(np.zeros(n), np.full(n, 22.5), noise, key_mask, derive_rng(6))
        bound = 4 * 0.5 / math.sqrt(n)
        assert abs(np.mean(a == 1) - 0.5) < bound
        assert abs(np.mean(b == 1) - 0.5) < bound

    def test_correlator_shrinks_with_bitflip(self):
        a_setting, b_setting = setting(Party.ALICE, 0.0), setting(Party.BOB, 22.5)
        grid = np.linspace(0.0, 0.5, 51)
        values = [correlator(a_setting, b_setting, NoiseModel(0.9115, p), False) for p in grid]
        assert all(later <= earlier for earlier, later in zip(values, values[1:]))
        assert values[-1] == pytest.approx(0.0)

    @pytest.mark.slow
    def test_mean_product_at_calibrated_visibility(self):
        n = 1_000_000
        a, b = sample_outcomes(
            np.zeros(n), np.full(n, 22.5), NoiseModel(0.9115), np.zeros(n, bool), derive_rng(7)
        )
        assert np.mean(a.astype(np.int64) * b) == pytest.approx(0.6445, abs=0.003)

    @pytest.mark.slow
    def test_bitflip_scales_product(self):
        """Flipping with p=0.25 multiplies the mean product by (1 - 2p)^2."""
        n = 1_000_000
        ideal = NoiseModel.ideal()
        a, b = sample_outcomes(
            np.zeros(n), np.zeros(n), ideal.with_bitflip(0.25), np.zeros(n, bool), derive_rng(8)
        )
        assert np.mean(a.astype(np.int64) * b) == pytest.approx(0.25, abs=0.01)

        rng = derive_rng(9)
        flips = 200_000
        total = sum(apply_bitflip(OutcomePair(1, 1), 0.25, rng).product for _ in range(flips))
        assert total / flips == pytest.approx(0.25, abs=0.01)

    @pytest.mark.slow
    def test_empirical_correlators_match_model(self):
        """Every configured setting pair lands within 5/sqrt(n) of its correlator."""
        n = 100_000
        alice = {0: -22.5, 1: 22.5, 2: -45.0, 3: 0.0}
        bob = {0: -22.5, 1: 22.5}
        noise = NoiseModel(visibility=0.9115, bitflip_prob=0.03, key_readout_error=0.0189)
        for x, angle_a in alice.items():
            for y, angle_b in bob.items():
                for is_key in (False, True):
                    a, b = sample_outcomes(
                        np.full(n, angle_a),
                        np.full(n, angle_b),
                        noise,
                        np.full(n, is_key),
                        derive_rng(10, x, y, int(is_key)),
                    )
                    expected = correlator(
                        setting(Party.ALICE, angle_a, x),
                        setting(Party.BOB, angle_b, y),
                        noise,
                        is_key,
                    )
                    assert abs(np.mean(a.astype(np.int64) * b) - expected) < 5 / math.sqrt(n)

    def test_vectorised_matches_scalar(self):
        """sample_outcomes consumes draws exactly like repeated scalar calls."""
        n = 300
        angle_rng = np.random.default_rng(5)
        angles_a = angle_rng.uniform(-90, 90, n)
        angles_b = angle_rng.uniform(-90, 90, n)
        key_mask = angle_rng.random(n) < 0.5
        noise = NoiseModel(visibility=0.9, bitflip_prob=0.05, key_readout_error=0.02)

        a, b = sample_outcomes(angles_a, angles_b, noise, key_mask, derive_rng(9, 1))
        scalar_rng = derive_rng(9, 1)
        for i in range(n):
            pair = sample_outcome_pair(
                setting(Party.ALICE, angles_a[i]),
                setting(Party.BOB, angles_b[i]),
                noise,
                bool(key_mask[i]),
                scalar_rng,
            )
            assert (pair.a, pair.b) == (a[i], b[i])


class TestAngleMap:
    """Tests for the input-to-angle lookup."""

    @pytest.fixture
    def angle_map(self):
        return AngleMap(alice={0: 0.0, 2: 45.0}, bob={0: 22.5})

    def test_setting_lookup(self, angle_map):
        assert angle_map.setting(Party.ALICE, 2).angle == 45.0

    def test_unknown_input(self, angle_map):
        with pytest.raises(ConfigurationError):
            angle_map.setting(Party.BOB, 1)

    def test_vectorised_lookup(self, angle_map):
        assert angle_map.angles(Party.ALICE, np.array([0, 2, 0])).tolist() == [0.0, 45.0, 0.0]

    def test_vectorised_gap_rejected(self, angle_map):
        """Index 1 lies inside the range but is not an input."""
        with pytest.raises(ConfigurationError):
            angle_map.angles(Party.ALICE, np.array([1]))

    def test_empty_alphabet(self):
        with pytest.raises(ConfigurationError):
            AngleMap(alice={}, bob={0: 0.0})
