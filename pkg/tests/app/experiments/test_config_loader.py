"""Tests for TOML experiment configs, overrides and the config hash."""

from fractions import Fraction

import pytest

from src.app.core.config import ArithmeticMode
from src.app.core.exceptions import ConfigurationError
from src.app.dynamics.group_folner import FolnerKind
from src.app.dynamics.systems import SystemKind
from src.app.experiments.config_loader import (
    build_folner,
    build_partition,
    build_system,
    config_hash,
    load_config,
    validate_config,
)
from src.app.schemas.experiment import (
    EntropyDichotomyConfig,
    FolnerSpecModel,
    HoeffdingConfig,
    PartitionSpec,
    SmbConfig,
    SystemSpec,
)


class TestLoadConfig:
    def test_defaults_without_a_file(self):
        cfg = load_config(None, "smb")
        assert isinstance(cfg, SmbConfig)
        assert cfg.systems[0].kind == SystemKind.BERNOULLI

    def test_toml_and_overrides(self, tmp_path):
        path = tmp_path / "hoeffding.toml"
        path.write_text('name = "desk"\nmax_n = 12\nsizes = [8, 16]\n\n[cover]\nepsilon = "1/8"\n')
        cfg = load_config(path, "hoeffding", {"seed": 5, "jobs": None, "arithmetic": "float"})
        assert isinstance(cfg, HoeffdingConfig)
        assert cfg.name == "desk"
        assert cfg.max_n == 12
        assert cfg.cover.EPSILON == Fraction(1, 8)
        assert cfg.seed == 5
        assert cfg.arithmetic == ArithmeticMode.FLOAT

    def test_declared_experiment_must_match(self, tmp_path):
        path = tmp_path / "smb.toml"
        path.write_text('experiment = "smb"\n')
        with pytest.raises(ConfigurationError) as exc_info:
            load_config(path, "hoeffding")
        assert exc_info.value.context["declared"] == "smb"

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigurationError):
            load_config(tmp_path / "absent.toml", "smb")

    def test_invalid_toml(self, tmp_path):
        path = tmp_path / "broken.toml"
        path.write_text("n_grid = [4, 8\n")
        with pytest.raises(ConfigurationError):
            load_config(path, "smb")


class TestValidation:
    @pytest.mark.parametrize(
        "data",
        [
            {"experiment": "smb", "n_grid": [8, 4]},
            {"experiment": "smb", "n_grid": []},
            {"experiment": "smb", "cover": {"epsilon": "1/10", "eta": "1/5"}},
            {"experiment": "smb", "cover": {"epsilon": "3/2"}},
            {"experiment": "smb", "unknown": 1},
            {"experiment": "entropy-dichotomy", "n_grid": [4, 8], "check_n": 6},
            {"experiment": "perturb-witness", "scales": {"auto": False}},
            {"experiment": "smb", "systems": [{"kind": "bernoulli", "probabilities": ["a"]}]},
            {"experiment": "noise"},
        ],
    )
    def test_rejected(self, data):
        with pytest.raises(ConfigurationError) as exc_info:
            validate_config(data)
        assert exc_info.value.error_code == "INVALID_CONFIG"
        assert exc_info.value.context["errors"]

    def test_rationals_are_normalized(self):
        coin = {"kind": "bernoulli", "probabilities": [0.25, "3/4"]}
        cfg = validate_config({"experiment": "smb", "systems": [coin]})
        assert cfg.systems[0].probabilities == ["1/4", "3/4"]


class TestConfigHash:
    def test_execution_fields_do_not_count(self, tmp_path):
        base = SmbConfig()
        moved = SmbConfig(out=str(tmp_path), jobs=4, plots=False, time_budget_s=5.0)
        assert config_hash(base) == config_hash(moved)

    def test_seed_and_content_count(self):
        base = SmbConfig()
        assert config_hash(base) != config_hash(SmbConfig(seed=base.seed + 1))
        assert config_hash(base) != config_hash(SmbConfig(n_grid=[4, 8]))
        assert len(config_hash(base)) == 64


class TestBuilders:
    @pytest.mark.parametrize(
        "spec, kind",
        [
            (SystemSpec(kind="bernoulli", probabilities=["1/3", "2/3"]), SystemKind.BERNOULLI),
            (SystemSpec(kind="markov", transition=[["1/2", "1/2"], ["1", "0"]]), SystemKind.MARKOV),
            (SystemSpec(kind="rotation", angle="1/5"), SystemKind.ROTATION),
            (SystemSpec(kind="sturmian"), SystemKind.STURMIAN),
            (SystemSpec(kind="substitution", rules=[[1, 2], [2, 1]]), SystemKind.SUBSTITUTION),
            (SystemSpec(kind="odometer", depth=3), SystemKind.ODOMETER),
            (SystemSpec(kind="empirical", sequence=[1, 2, 2, 1, 2]), SystemKind.EMPIRICAL),
        ],
    )
    def test_every_system_kind(self, spec, kind):
        assert build_system(spec).kind == kind

    def test_label_is_applied(self):
        assert build_system(SystemSpec(kind="sturmian", label="golden")).label == "golden"

    def test_rotation_needs_angle(self):
        with pytest.raises(ConfigurationError):
            build_system(SystemSpec(kind="rotation"))

    def test_folner_and_partition(self):
        assert build_folner(FolnerSpecModel(kind="box", dimension=2)).kind == FolnerKind.BOX
        assert build_partition(None) is None
        assert build_partition(PartitionSpec(mapping=[1, 1, 2])).mapping == (1, 1, 2)

    def test_custom_folner_is_not_configurable(self):
        with pytest.raises(ConfigurationError):
            build_folner(FolnerSpecModel(kind="custom"))

    def test_dichotomy_defaults(self):
        cfg = EntropyDichotomyConfig()
        assert cfg.positive.kind == SystemKind.BERNOULLI
        assert cfg.zero.kind == SystemKind.STURMIAN
