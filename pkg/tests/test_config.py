import numpy as np
import pytest

from src.errors import ConfigError
from src.runners.experiment import ExperimentConfig
from src.utils.config import ConfigManager


class TestConfigManager:
    def test_defaults_match_dataclass(self, config_dir):
        config = ExperimentConfig.from_mapping(ConfigManager(str(config_dir)).get_full_config())
        assert config == ExperimentConfig()

    def test_presets_listed(self, config_dir):
        assert ConfigManager(str(config_dir)).list_available_experiments() == ["mise_rate", "table1", "table2"]

    def test_preset_merges_over_defaults(self, config_dir):
        merged = ConfigManager(str(config_dir)).get_full_config("mise_rate")
        assert merged["experiment"]["known_effects"] is True
        assert merged["experiment"]["n_subjects"] == 250
        assert merged["estimator"]["bernstein"]["m_policy"] == "theoretical_opt"
        assert merged["estimator"]["kernel"]["kde_policy"] == "silverman_paper"

    def test_overrides_win(self, config_dir):
        manager = ConfigManager(str(config_dir))
        overrides = ConfigManager.parse_overrides(["experiment.n_subjects=50", "model.hurst=0.8"])
        merged = manager.get_full_config("table1", overrides)
        assert merged["experiment"]["n_subjects"] == 50
        assert merged["model"]["hurst"] == 0.8
        assert merged["experiment"]["replicates"] == 100

    def test_parse_overrides_yaml_scalars(self):
        parsed = ConfigManager.parse_overrides(["a.b=1", "a.c=true", "d=[1, 2]", "e=text"])
        assert parsed == {"a": {"b": 1, "c": True}, "d": [1, 2], "e": "text"}

    def test_malformed_override(self):
        with pytest.raises(ConfigError):
            ConfigManager.parse_overrides(["experiment.n_subjects"])

    def test_missing_directory(self, tmp_path):
        with pytest.raises(ConfigError):
            ConfigManager(str(tmp_path / "nowhere"))

    def test_missing_experiments_directory(self, tmp_path):
        with pytest.raises(ConfigError):
            ConfigManager(str(tmp_path))

    def test_malformed_yaml(self, tmp_path):
        (tmp_path / "experiments").mkdir()
        (tmp_path / "defaults.yaml").write_text("model: [unclosed\n")
        with pytest.raises(ConfigError, match="Malformed YAML"):
            ConfigManager(str(tmp_path))

    def test_non_mapping_yaml(self, tmp_path):
        (tmp_path / "experiments").mkdir()
        (tmp_path / "defaults.yaml").write_text("- 1\n- 2\n")
        with pytest.raises(ConfigError):
            ConfigManager(str(tmp_path))

    def test_unknown_preset(self, config_dir):
        with pytest.raises(ConfigError):
            ConfigManager(str(config_dir)).get_full_config("table9")

    def test_sweep(self, config_dir):
        sweep = ConfigManager(str(config_dir)).load_sweep()
        assert sweep["method"] == "grid"
        assert sweep["parameters"]["n_subjects"]["values"] == [50, 200, 500]

    def test_save_and_reload(self, config_dir, tmp_path):
        manager = ConfigManager(str(config_dir))
        (tmp_path / "experiments").mkdir()
        manager.save_config(manager.get_full_config(), tmp_path / "defaults.yaml")
        assert ConfigManager(str(tmp_path)).defaults == manager.defaults


class TestExperimentConfig:
    def test_collects_every_error(self):
        with pytest.raises(ConfigError) as exc_info:
            ExperimentConfig(hurst=0.3, n_subjects=2, density="gamma", m_policy="aic")
        message = str(exc_info.value)
        assert message.startswith("Config validation failed:")
        assert message.count("\n- ") == 4
        assert "model.hurst" in message

    @pytest.mark.parametrize("hurst", [0.5, 1.0])
    def test_hurst_bounds_are_open(self, hurst):
        with pytest.raises(ConfigError):
            ExperimentConfig(hurst=hurst)

    def test_fixed_policies_need_values(self):
        with pytest.raises(ConfigError, match="estimator.bernstein.m"):
            ExperimentConfig(m_policy="fixed")
        with pytest.raises(ConfigError, match="estimator.kernel.h"):
            ExperimentConfig(kde_policy="fixed")
        assert ExperimentConfig(m_policy="fixed", m=8).m == 8

    def test_cholesky_limit(self):
        with pytest.raises(ConfigError, match="max_cholesky_steps"):
            ExperimentConfig(steps=5000)
        assert ExperimentConfig(steps=5000, fbm_method="davies_harte").steps == 5000

    def test_user_density_needs_components(self):
        with pytest.raises(ConfigError):
            ExperimentConfig(density="user")

    def test_unknown_drift(self):
        with pytest.raises(ConfigError, match="Unknown drift"):
            ExperimentConfig(drift={"name": "cubic"})

    def test_from_mapping_reads_sections(self):
        config = ExperimentConfig.from_mapping({
            "global": {"seed": 3, "workers": 2},
            "model": {"hurst": 0.6},
            "grid": {"horizon": 20, "steps": 200},
            "drift": {"name": "vasicek", "beta": 0.5, "sigma": 1.0, "x0": 1.5},
            "density": {"name": "beta_mix"},
            "experiment": {"n_subjects": 40, "known_effects": True},
            "estimator": {"bernstein": {"m_policy": "fixed", "m": 6, "m_grid": [2, 4]}},
            "evaluation": {"eval_grid": 11},
        })
        assert (config.seed, config.workers, config.hurst) == (3, 2, 0.6)
        assert (config.horizon, config.steps) == (20.0, 200)
        assert config.x0 == 1.5
        assert "x0" not in config.drift
        assert config.m_grid == (2, 4)
        assert config.known_effects is True

    def test_from_mapping_bad_types(self):
        with pytest.raises(ConfigError):
            ExperimentConfig.from_mapping({"grid": {"steps": "many"}})

    def test_eval_points_include_boundary(self):
        points = ExperimentConfig(eval_grid=11).eval_points()
        for x in (0.0, 0.01, 0.99, 1.0):
            assert np.any(np.isclose(points, x, rtol=0.0, atol=0.0))
        assert np.all(np.diff(points) > 0)
        assert points.size == 13
