"""Tests for the command-line interface."""

import argparse
import json

import pytest

from diqsim.experiments.outputs import read_rounds_csv
from diqsim.main import cli_dispatch, parse_grid
from diqsim.utils.logger import configure_default_logging

from .conftest import DEFAULT_CONFIG


@pytest.fixture(autouse=True)
def reset_logging():
    """setup_logger binds the captured stderr; restore the quiet default after each test."""
    yield
    configure_default_logging()


@pytest.fixture
def small_config(tmp_path):
    path = tmp_path / "small.yaml"
    path.write_text("experiment:\n  n_rounds: 1000\n  repetitions: 2\n")
    return path


def run(capsys, *argv: str) -> tuple[int, str, str]:
    code = cli_dispatch(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestParseGrid:
    """Tests for grid parsing."""

    def test_range_is_inclusive(self):
        assert parse_grid("0:0.1:0.05") == [0.0, 0.05, 0.1]

    def test_comma_list(self):
        assert parse_grid("0.1, 0.3") == [0.1, 0.3]

    def test_bad_step(self):
        with pytest.raises(argparse.ArgumentTypeError):
            parse_grid("0:1:0")


class TestUsage:
    """Tests for argument handling and exit codes."""

    def test_no_command(self, capsys):
        code, _, err = run(capsys)
        assert code == 1
        assert "diqsim" in err

    def test_unknown_command(self, capsys):
        assert run(capsys, "teleport")[0] == 1

    def test_bad_grid(self, capsys):
        assert run(capsys, "sweep", "--grid", "a:b:c")[0] == 1

    def test_version(self, capsys):
        code, out, _ = run(capsys, "--version")
        assert code == 0
        assert out.startswith("diqsim")

    def test_missing_config(self, capsys, tmp_path):
        code, _, err = run(capsys, "rate", "--s", "2.5", "--q", "0.05", "-c", str(tmp_path / "x"))
        assert code == 1
        assert "not found" in err

    def test_negative_seed(self, capsys):
        assert run(capsys, "rate", "--seed", "-1", "--s", "2.5", "--q", "0.05")[0] == 1


class TestRate:
    """Tests for the rate subcommand."""

    def test_single_value(self, capsys):
        code, out, _ = run(capsys, "rate", "--s", "2.4267", "--q", "0.071")
        assert code == 0
        assert abs(json.loads(out)["rate_per_bit"]) < 0.01

    def test_no_violation_exits_two(self, capsys):
        assert run(capsys, "rate", "--s", "1.9", "--q", "0.05")[0] == 2

    def test_out_of_range_exits_one(self, capsys):
        assert run(capsys, "rate", "--s", "2.5", "--q", "0.6")[0] == 1

    def test_half_pair(self, capsys):
        assert run(capsys, "rate", "--s", "2.5")[0] == 1

    def test_table(self, capsys):
        code, out, _ = run(capsys, "rate")
        lines = out.splitlines()
        assert code == 0
        assert lines[0] == "q,s,rate_per_bit"
        assert len(lines) == 22
        assert float(lines[1].split(",")[2]) == pytest.approx(1.0)


class TestSimulate:
    """Tests for the simulate subcommand."""

    def test_reproducible(self, capsys, tmp_path):
        outputs = []
        for name in ("a", "b"):
            out_dir = tmp_path / name
            args = ("simulate", "-c", str(DEFAULT_CONFIG), "--seed", "7", "--rounds", "2000")
            code, out, _ = run(capsys, *args, "--out", str(out_dir))
            assert code in (0, 2)
            outputs.append((out, (out_dir / "summary.json").read_bytes()))
        assert outputs[0] == outputs[1]
        assert json.loads(outputs[0][0])["seed"] == 7

    def test_dump_rounds(self, capsys, tmp_path):
        args = ("simulate", "-c", str(DEFAULT_CONFIG), "--rounds", "2000", "--dump-rounds")
        run(capsys, *args, "--out", str(tmp_path))
        assert len(read_rounds_csv(tmp_path / "rounds.csv")) == 2000
        assert (tmp_path / "parities.csv").exists()

    def test_abort_exits_two(self, capsys, tmp_path):
        config = tmp_path / "noisy.yaml"
        config.write_text("devices:\n  noise:\n    bitflip_prob: 0.3\n")
        code, out, _ = run(capsys, "simulate", "-c", str(config), "--out", str(tmp_path))
        assert code == 2
        assert json.loads(out)["abort_reason"] == "no_bell_violation"

    def test_repetitions(self, capsys, tmp_path, small_config):
        code, out, _ = run(
            capsys, "simulate", "-c", str(small_config), "--reps", "2", "--out", str(tmp_path)
        )
        data = json.loads(out)
        assert code == 0
        assert len(data["runs"]) == 2

    def test_bad_rounds(self, capsys, tmp_path):
        assert run(capsys, "simulate", "--rounds", "0", "--out", str(tmp_path))[0] == 1


class TestSweepAndHeatmap:
    """Tests for the sweep and heatmap subcommands."""

    def test_sweep_csv(self, capsys, tmp_path, small_config):
        code, out, _ = run(
            capsys,
            "sweep",
            "-c",
            str(small_config),
            "--grid",
            "0:0.04:0.02",
            "--reps",
            "2",
            "--rounds",
            "500",
            "--out",
            str(tmp_path),
        )
        lines = out.splitlines()
        assert code == 0
        assert lines[0] == "noise,mean_s,std_s,qber_pre,qber_post,reps"
        assert [line.split(",")[0] for line in lines[1:]] == ["0.0", "0.02", "0.04"]
        assert (tmp_path / "sweep.csv").read_text() == out

    def test_heatmap_csv(self, capsys, tmp_path, small_config):
        code, out, _ = run(
            capsys,
            "heatmap",
            "-c",
            str(small_config),
            "--grid",
            "0,0.05",
            "--passes",
            "3",
            "--reps",
            "1",
            "--length",
            "500",
            "--out",
            str(tmp_path),
        )
        lines = out.splitlines()
        assert code == 0
        assert lines[0] == "noise,pass,ratio"
        assert len(lines) == 1 + 2 * 4
        assert lines[1] == "0.0,0,1.0"


class TestCascadeCommand:
    """Tests for the cascade subcommand."""

    def test_bit_files(self, capsys, tmp_path):
        alice, bob = tmp_path / "alice.txt", tmp_path / "bob.txt"
        alice.write_text("0110100110010110\n")
        bob.write_text("0110100111010110\n")
        code, out, _ = run(
            capsys, "cascade", "--alice", str(alice), "--bob", str(bob), "--out", str(tmp_path)
        )
        data = json.loads(out)
        assert code == 0
        assert data["initial_errors"] == 1
        assert data["residual_errors"][-1] == 0
        assert (tmp_path / "corrected.txt").read_text() == "0110100110010110\n"
        corrections = (tmp_path / "corrections.csv").read_text().splitlines()
        assert corrections[1] == "1,9,1"

    def test_simulated_channel(self, capsys, tmp_path):
        code, out, _ = run(
            capsys, "cascade", "--length", "2000", "--qber", "0.05", "--out", str(tmp_path)
        )
        data = json.loads(out)
        assert code == 0
        assert data["n"] == 2000
        assert data["passes"] == 4
        assert data["leaked_bits"] > 0

    def test_needs_inputs(self, capsys, tmp_path):
        assert run(capsys, "cascade", "--out", str(tmp_path))[0] == 1

    def test_unequal_files(self, capsys, tmp_path):
        alice, bob = tmp_path / "alice.txt", tmp_path / "bob.txt"
        alice.write_text("0101")
        bob.write_text("010")
        assert run(capsys, "cascade", "--alice", str(alice), "--bob", str(bob))[0] == 1
