"""Unit tests for BitString."""

import pytest

from diqsim.bits import BitString


class TestBitString:
    """Tests for the immutable bit string."""

    def test_parse_and_render(self):
        assert BitString.from_str("1011 0").to_str() == "10110"

    def test_invalid_characters(self):
        with pytest.raises(ValueError):
            BitString.from_str("10a1")

    def test_invalid_values(self):
        with pytest.raises(ValueError):
            BitString([0, 2])

    def test_read_only(self):
        bits = BitString.from_str("0101")
        with pytest.raises(ValueError):
            bits.bits[0] = 1

    def test_flip_returns_copy(self):
        original = BitString.from_str("0000")
        flipped = original.flip(1, 3)
        assert flipped.to_str() == "0101"
        assert original.to_str() == "0000"

    def test_distance(self):
        a, b = BitString.from_str("110010"), BitString.from_str("010011")
        assert a.hamming(b) == 2
        assert a.diff_positions(b) == [0, 5]
        assert a.xor(b).to_str() == "100001"

    def test_parity(self):
        assert BitString.from_str("1101").parity() == 1
        assert BitString().parity() == 0

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            BitString.from_str("01").hamming(BitString.from_str("011"))

    def test_hashable(self):
        assert len({BitString.from_str("01"), BitString.from_str("01")}) == 1

    def test_random_is_seeded(self, rng):
        assert len(BitString.random(64, rng)) == 64
