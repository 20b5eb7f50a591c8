"""Tests for the command-line front-end."""

from pathlib import Path

import pytest
import yaml

from noiseless.cli import build_parser, main

from .fixtures import write_config

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def run(capsys, *argv: str) -> tuple[int, dict | None, str]:
    """Run the CLI; returns (exit code, parsed structured stdout, unwrapped stderr)."""
    code = main(list(argv))
    captured = capsys.readouterr()
    document = yaml.safe_load(captured.out) if "structured" in argv and captured.out else None
    return code, document, " ".join(captured.err.split())


class TestParser:
    """Test argument parsing."""

    def test_subcommand_required(self):
        """A bare invocation is a usage error."""
        with pytest.raises(SystemExit):
            build_parser().parse_args([])

    def test_global_options_after_subcommand(self):
        """Global options are accepted by every subcommand."""
        args = build_parser().parse_args(["bound", "--be-constant", "1.1182", "--stein-k", "26"])
        assert args.be_constant == 1.1182
        assert args.stein_k == 26

    def test_constant_choices(self):
        """Only the two published constants are accepted."""
        with pytest.raises(SystemExit):
            build_parser().parse_args(["bound", "--stein-k", "27"])

    def test_compromised_list(self):
        """Compromised indices are comma-separated."""
        args = build_parser().parse_args(["bound", "--compromised", "0, 4,7"])
        assert args.compromised == frozenset({0, 4, 7})


class TestBound:
    """Test the bound subcommand."""

    def test_example_profile(self, capsys):
        """epsilon in (0.45, 0.46), delta in (0.018, 0.020)."""
        code, document, _ = run(
            capsys,
            "bound",
            "--config",
            str(CONFIGS / "example-profile.yaml"),
            "--model",
            "independent",
            "--format",
            "structured",
        )
        assert code == 0
        assert 0.45 < document["epsilon"] < 0.46
        assert 0.018 < document["delta"] < 0.020
        assert document["source"] == "independent"

    def test_binomial(self, capsys):
        """n = 10^4 fair bits at delta = 0.05."""
        code, document, _ = run(
            capsys,
            "bound",
            "--config",
            str(CONFIGS / "binomial.yaml"),
            "--model",
            "binomial",
            "--delta",
            "0.05",
            "--format",
            "structured",
        )
        assert code == 0
        assert document["epsilon"] == pytest.approx(0.05508, abs=1e-5)

    def test_binomial_needs_a_parameter(self, capsys):
        """Either --delta or --epsilon."""
        code, _, err = run(
            capsys, "bound", "--config", str(CONFIGS / "binomial.yaml"), "--model", "binomial"
        )
        assert code == 4
        assert "--delta or --epsilon" in err

    def test_tail_dominates(self, capsys, tmp_path):
        """A too-small delta on few records exits 5 and names the minimum."""
        path = write_config(tmp_path, "records:\n  - family: bernoulli\n    p: 0.5\n    count: 10\n")
        code, _, err = run(
            capsys, "bound", "--config", str(path), "--model", "binomial", "--delta", "1e-6"
        )
        assert code == 5
        assert "tail dominates" in err

    def test_gamma_override(self, capsys):
        """--gamma 0.5 on the profile gives epsilon near 0.619."""
        code, document, _ = run(
            capsys,
            "bound",
            "--config",
            str(CONFIGS / "example-profile.yaml"),
            "--gamma",
            "0.5",
            "--format",
            "structured",
        )
        assert code == 0
        assert document["epsilon"] == pytest.approx(0.6191, abs=1e-4)
        assert document["source"] == "independent-compromised"
        assert len(document["compromised"]) == 5000

    def test_delta_adversarial(self, capsys):
        """The supplementary search adds a second bound."""
        code, document, _ = run(
            capsys,
            "bound",
            "--config",
            str(CONFIGS / "compromised.yaml"),
            "--delta-adversarial",
            "--format",
            "structured",
        )
        assert code == 0
        assert document["supplementary"]["delta"] >= document["delta"]

    def test_dependency_bound_needs_total_variance(self, capsys):
        """Raising D without a total variance is an invariant error."""
        code, _, err = run(
            capsys,
            "bound",
            "--config",
            str(CONFIGS / "example-profile.yaml"),
            "--dependency-bound",
            "3",
        )
        assert code == 4
        assert "total_variance required" in err

    def test_dependent_model(self, capsys):
        """--model dependent applies the Stein bound."""
        code, document, _ = run(
            capsys,
            "bound",
            "--config",
            str(CONFIGS / "block-dependent.yaml"),
            "--stein-k",
            "26",
            "--format",
            "structured",
        )
        assert code == 0
        assert document["source"] == "dependent"
        assert document["vacuous"] is True

    def test_text_output(self, capsys):
        """Text reports are rich tables on stdout."""
        code = main(["bound", "--config", str(CONFIGS / "example-profile.yaml")])
        out = capsys.readouterr().out
        assert code == 0
        assert "epsilon" in out
        assert "independent" in out


class TestErrors:
    """Test exit codes of config problems."""

    def test_parse_error(self, capsys, tmp_path):
        """Broken YAML exits 2."""
        path = write_config(tmp_path, "records: [")
        code, _, err = run(capsys, "moments", "--config", str(path))
        assert code == 2
        assert "not valid YAML" in err

    def test_schema_error(self, capsys, tmp_path):
        """Unknown keys exit 3."""
        path = write_config(tmp_path, "recrods: []\n")
        code, _, _ = run(capsys, "moments", "--config", str(path))
        assert code == 3

    def test_invariant_error(self, capsys, tmp_path):
        """Domain violations exit 4 with the field path."""
        path = write_config(tmp_path, "records:\n  - family: bernoulli\n    p: 2.0\n")
        code, _, err = run(capsys, "moments", "--config", str(path))
        assert code == 4
        assert "records[0]" in err

    def test_config_required(self, capsys):
        """bound needs a config."""
        code, _, _ = run(capsys, "bound")
        assert code == 4


class TestMoments:
    """Test the moments subcommand."""

    def test_profile(self, capsys):
        """Totals of the profile."""
        code, document, _ = run(
            capsys,
            "moments",
            "--config",
            str(CONFIGS / "example-profile.yaml"),
            "--format",
            "structured",
        )
        assert code == 0
        assert document["n"] == 10_000
        assert document["total_variance"] == 40_000.0


class TestPlan:
    """Test the plan subcommand."""

    def test_no_config(self, capsys):
        """No assumptions: standard DP with the Laplace baseline."""
        code, document, _ = run(
            capsys, "plan", "--sensitivity", "1", "--target-epsilon", "1", "--format", "structured"
        )
        assert code == 0
        assert document["chosen_path"] == "standard-dp"
        assert document["baseline_laplace_variance"] == pytest.approx(2.0)

    def test_no_assumptions_config(self, capsys):
        """The no-assumptions config takes its target from the file."""
        code, document, _ = run(
            capsys,
            "plan",
            "--config",
            str(CONFIGS / "no-assumptions.yaml"),
            "--format",
            "structured",
        )
        assert code == 0
        assert document["chosen_path"] == "standard-dp"

    def test_profile_target(self, capsys):
        """The profile meets its own (0.5, 0.05) target without noise."""
        code, document, _ = run(
            capsys,
            "plan",
            "--config",
            str(CONFIGS / "example-profile.yaml"),
            "--format",
            "structured",
        )
        assert code == 0
        assert document["chosen_path"] == "noiseless-independent"
        assert document["noise_plan"] is None

    def test_noise(self, capsys):
        """A stricter epsilon adds Laplace noise."""
        code, document, _ = run(
            capsys,
            "plan",
            "--config",
            str(CONFIGS / "example-profile.yaml"),
            "--target-epsilon",
            "0.3",
            "--noise-family",
            "laplace",
            "--format",
            "structured",
        )
        assert code == 0
        assert document["chosen_path"] == "noiseless+noise"
        assert document["noise_plan"]["laplace_scale"] > 0
        assert document["bound"]["epsilon"] == pytest.approx(0.3)


class TestVerify:
    """Test the verify subcommand."""

    def test_block_dependent_exact(self, capsys):
        """The correlated pairs pass the exact oracle."""
        code, document, _ = run(
            capsys,
            "verify",
            "--config",
            str(CONFIGS / "block-dependent.yaml"),
            "--exact",
            "--format",
            "structured",
        )
        assert code == 0
        assert document["verdict"] == "PASS"
        assert document["method"] == "exact"
        assert document["measured_delta"] <= document["claimed_delta"]

    def test_binomial_exact(self, capsys):
        """10^4 fair bits at delta = 0.05."""
        code, document, _ = run(
            capsys,
            "verify",
            "--config",
            str(CONFIGS / "binomial.yaml"),
            "--model",
            "binomial",
            "--delta",
            "0.05",
            "--format",
            "structured",
        )
        assert code == 0
        assert document["verdict"] == "PASS"
        assert document["measured_delta"] <= 0.05

    def test_epsilon_below_bound(self, capsys):
        """Checking below the bound's epsilon is refused."""
        code, _, err = run(
            capsys,
            "verify",
            "--config",
            str(CONFIGS / "block-dependent.yaml"),
            "--epsilon",
            "0.01",
        )
        assert code == 4
        assert "below the bound's epsilon" in err

    def test_monte_carlo(self, capsys, tmp_path):
        """The sampled estimate reports its confidence half-width."""
        path = write_config(tmp_path, "records:\n  - family: bernoulli\n    p: 0.5\n    count: 40\n")
        code, document, _ = run(
            capsys,
            "verify",
            "--config",
            str(path),
            "--mc",
            "--samples",
            "10000",
            "--seed",
            "1",
            "--format",
            "structured",
        )
        assert code == 0
        assert document["method"].startswith("monte-carlo")
        assert document["ci95"] >= 0
        assert document["samples"] == 10_000

    def test_compromised_conditioned(self, capsys, tmp_path):
        """Known records are fixed at their most likely value."""
        path = write_config(
            tmp_path,
            "records:\n  - family: bernoulli\n    p: 0.3\n    count: 40\ngamma: 0.1\n",
        )
        code, document, _ = run(
            capsys, "verify", "--config", str(path), "--format", "structured"
        )
        assert code == 0
        assert document["conditioned_on"] == [0, 1, 2, 3]

    def test_dependent_without_blocks(self, capsys, tmp_path):
        """D > 1 with no joint law cannot be verified and exits 5."""
        path = write_config(
            tmp_path,
            "records:\n  - family: bernoulli\n    p: 0.5\n    count: 40\n"
            "dependency_bound: 2\ntotal_variance: 10.0\n",
        )
        code, _, err = run(capsys, "verify", "--config", str(path), "--exact")
        assert code == 5
        assert "dependency_blocks" in err

    def test_moments_only_exact(self, capsys):
        """Laws without a pmf cannot be checked exactly."""
        code, _, err = run(capsys, "verify", "--config", str(CONFIGS / "example-profile.yaml"))
        assert code == 5
        assert "use mc_estimate" in err


class TestCurves:
    """Test the curves subcommand."""

    def test_output_file(self, capsys, tmp_path):
        """The CSV goes to --output."""
        target = tmp_path / "noise.csv"
        code = main(["curves", "--figure", "6", "--points", "20", "--output", str(target)])
        assert code == 0
        assert target.read_text(encoding="utf-8").splitlines()[0] == "n,value,baseline"

    def test_stdout(self, capsys):
        """Without --output the CSV goes to stdout."""
        code = main(["curves", "--figure", "1", "--n-min", "100", "--n-max", "200", "--points", "5"])
        lines = capsys.readouterr().out.splitlines()
        assert code == 0
        assert lines[0] == "n,value"
        assert len(lines) == 6

    def test_unknown_figure(self, capsys):
        """Unknown figures exit 4."""
        code = main(["curves", "--figure", "5"])
        assert code == 4
