"""Tests for config file ingestion."""

from pathlib import Path

import pytest

from noiseless.errors import ConfigParseError, ConfigSchemaError, InvariantError
from noiseless.model import Family
from noiseless.schema import ingest_config, load_bundle, parse_config_text

from .fixtures import write_config

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


class TestParse:
    """Test YAML parsing and schema validation."""

    def test_not_yaml(self):
        """Broken YAML is a parse error."""
        with pytest.raises(ConfigParseError) as info:
            parse_config_text("records: [unclosed", "bad.yaml")
        assert info.value.exit_code == 2

    def test_top_level_mapping(self):
        """A bare list is not a config."""
        with pytest.raises(ConfigParseError, match="mapping"):
            parse_config_text("- 1\n- 2\n")

    def test_unknown_key(self):
        """Unknown keys are schema errors naming the key."""
        with pytest.raises(ConfigSchemaError, match="sensitivty") as info:
            parse_config_text("sensitivty: 1.0\n")
        assert info.value.exit_code == 3

    def test_unknown_family(self):
        """The record family selects the record schema."""
        with pytest.raises(ConfigSchemaError, match="records"):
            parse_config_text("records:\n  - family: poisson\n    rate: 2\n")

    def test_wrong_type_path(self):
        """The field path of a type error points into the list."""
        with pytest.raises(ConfigSchemaError, match=r"records\[0\]"):
            parse_config_text("records:\n  - family: bernoulli\n    p: high\n")

    def test_empirical_needs_one_source(self):
        """Empirical records take values or a path, not both."""
        text = "records:\n  - family: empirical\n    values: [1, 2]\n    path: x.csv\n    column: a\n"
        with pytest.raises(ConfigSchemaError, match="exactly one"):
            parse_config_text(text)

    def test_empty_file(self):
        """An empty file parses to the defaults."""
        config = parse_config_text("")
        assert config.records is None
        assert config.dependency_bound == 1


class TestBuild:
    """Test domain validation of schema-valid configs."""

    def test_invariant_names_record(self, tmp_path):
        """An invalid record is reported with its position and name."""
        path = write_config(tmp_path, "records:\n  - family: bernoulli\n    name: age\n    p: 1.5\n")
        with pytest.raises(InvariantError, match=r"records\[0\] \('age'\)") as info:
            load_bundle(path)
        assert info.value.exit_code == 4

    def test_missing_file(self, tmp_path):
        """An unreadable file is a parse error."""
        with pytest.raises(ConfigParseError, match="cannot read"):
            load_bundle(tmp_path / "missing.yaml")

    def test_no_records_needs_sensitivity(self, tmp_path):
        """Without records a sensitivity is required."""
        path = write_config(tmp_path, "gamma: 0.1\n")
        with pytest.raises(InvariantError, match="sensitivity"):
            load_bundle(path)

    def test_blocks_need_records(self, tmp_path):
        """Dependency blocks refer to records."""
        text = (
            "sensitivity: 1.0\ndependency_blocks:\n  - indices: [0, 1]\n"
            "    outcomes:\n      - {values: [0, 0], prob: 1.0}\n"
        )
        with pytest.raises(InvariantError, match="dependency_blocks"):
            load_bundle(write_config(tmp_path, text))

    def test_gamma_too_large(self, tmp_path):
        """gamma outside [0, 1) is an invariant error."""
        path = write_config(tmp_path, "records:\n  - family: bernoulli\n    p: 0.5\n    count: 10\ngamma: 1.0\n")
        with pytest.raises(InvariantError, match="gamma"):
            load_bundle(path)

    def test_empirical_inline(self, tmp_path):
        """Inline values give a tagged empirical record."""
        path = write_config(
            tmp_path, "records:\n  - family: empirical\n    values: [1, 2, 2, 3]\n    count: 50\n"
        )
        spec, _ = ingest_config(path)
        assert spec.records[0].empirical
        assert spec.records[0].family is Family.DISCRETE
        assert spec.n == 50

    def test_empirical_csv(self, tmp_path):
        """A CSV column is read relative to the config file."""
        (tmp_path / "data.csv").write_text("id,score\n1,3\n2,4\n3,4\n4,5\n", encoding="utf-8")
        path = write_config(
            tmp_path,
            "records:\n  - family: empirical\n    path: data.csv\n    column: score\n",
        )
        spec, _ = ingest_config(path)
        assert dict(spec.records[0].support) == pytest.approx({3.0: 0.25, 4.0: 0.5, 5.0: 0.25})

    def test_empirical_csv_missing_column(self, tmp_path):
        """An absent column is a parse error."""
        (tmp_path / "data.csv").write_text("id,score\n1,3\n", encoding="utf-8")
        path = write_config(
            tmp_path,
            "records:\n  - family: empirical\n    path: data.csv\n    column: rating\n",
        )
        with pytest.raises(ConfigParseError, match="rating"):
            load_bundle(path)


class TestShippedConfigs:
    """The sample configs load."""

    def test_example_profile(self):
        """10^4 moments-only records and a target."""
        bundle = load_bundle(CONFIGS / "example-profile.yaml")
        assert bundle.spec.n == 10_000
        assert bundle.spec.sensitivity == 30.0
        assert bundle.target_epsilon == 0.5
        assert bundle.target_delta == 0.05

    def test_block_dependent(self):
        """Twelve correlated pairs."""
        bundle = load_bundle(CONFIGS / "block-dependent.yaml")
        assert bundle.spec.dependency_bound == 2
        assert len(bundle.spec.dependency_blocks) == 12
        assert bundle.spec.total_variance == pytest.approx(9.6)

    def test_empirical(self):
        """The ratings column is fitted."""
        bundle = load_bundle(CONFIGS / "empirical.yaml")
        assert bundle.spec.has_empirical

    def test_no_assumptions(self):
        """Without records only the sensitivity and target are known."""
        spec, adversary = ingest_config(CONFIGS / "no-assumptions.yaml")
        assert spec is None
        assert adversary.gamma == 0.0

    def test_compromised(self):
        """Half of the profile is known."""
        bundle = load_bundle(CONFIGS / "compromised.yaml")
        assert bundle.adversary.gamma == 0.5
