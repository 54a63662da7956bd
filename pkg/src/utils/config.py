import os
from typing import Any, Dict, Iterable, Optional, Tuple

import yaml

from src.errors import ConfigError, ReportError


class ConfigManager:
    def __init__(self, base_config_path="configs", load_defaults=True):
        self.base_config_path = base_config_path

        if not os.path.exists(base_config_path):
            raise ConfigError(f"Base config directory not found: {base_config_path}")
        if not os.path.isdir(base_config_path):
            raise ConfigError(f"Path is not a directory: {base_config_path}")

        self.experiments_path = os.path.join(base_config_path, "experiments")
        if not os.path.isdir(self.experiments_path):
            raise ConfigError(f"Experiments config directory not found: {self.experiments_path}")

        self._config_cache = {}

        if load_defaults:
            self.defaults = self._load_yaml_file("defaults.yaml")
        else:
            self.defaults = {}

    def get_full_config(self, experiment_name=None, cli_overrides=None):
        """Merge defaults, an optional experiment preset and CLI overrides."""
        merged = dict(self.defaults or {})

        if experiment_name:
            available = self.list_available_experiments()
            if os.path.splitext(experiment_name)[0] not in available:
                raise ConfigError(f"Unknown experiment preset '{experiment_name}', expected one of {available}")
            preset = self._load_yaml_file(os.path.join("experiments", self._with_suffix(experiment_name)))
            merged = self._deep_merge_dicts(merged, preset)

        if cli_overrides and isinstance(cli_overrides, dict):
            merged = self._deep_merge_dicts(merged, cli_overrides)

        return merged

    def load_sweep(self, filename="Sweep.yaml"):
        """Return the `sweep` section of a sweep file."""
        data = self._load_yaml_file(filename)
        if "sweep" not in data or not isinstance(data["sweep"], dict):
            raise ConfigError(f"Sweep file has no 'sweep' mapping: {filename}")
        return data["sweep"]

    def save_config(self, config, filepath):
        """Save a config to a YAML file"""
        try:
            os.makedirs(os.path.dirname(str(filepath)) or ".", exist_ok=True)
            with open(filepath, 'w') as f:
                yaml.safe_dump(config, f, sort_keys=True)
        except OSError as exc:
            raise ReportError(f"Cannot write config snapshot: {exc}", str(filepath)) from exc

    def list_available_experiments(self):
        """Return the names of the experiment presets."""
        files = os.listdir(self.experiments_path)
        return sorted(os.path.splitext(f)[0] for f in files if self._is_config_file(f))

    @staticmethod
    def nest(values: Iterable[Tuple[str, Any]]) -> Dict[str, Any]:
        """Turn [("a.b", 1), ("c", "x")] into {"a": {"b": 1}, "c": "x"}; values are kept as given."""
        nested: Dict[str, Any] = {}
        for key, value in values:
            node = nested
            parts = key.strip().split(".")
            for part in parts[:-1]:
                node = node.setdefault(part, {})
            node[parts[-1]] = value
        return nested

    @classmethod
    def parse_overrides(cls, pairs: Optional[Iterable[str]]) -> Dict[str, Any]:
        """Turn ["a.b=1", "c=x"] into {"a": {"b": 1}, "c": "x"}; values are YAML scalars."""
        values = []
        for pair in pairs or []:
            if "=" not in pair:
                raise ConfigError(f"Override must look like key.path=value, got '{pair}'")
            key, raw = pair.split("=", 1)
            values.append((key, yaml.safe_load(raw)))
        return cls.nest(values)

    def _load_yaml_file(self, filename):
        """Load a YAML file relative to the config directory"""
        if filename in self._config_cache:
            return self._config_cache[filename]

        path = os.path.join(self.base_config_path, filename)
        try:
            with open(path, 'r') as f:
                data = yaml.safe_load(f)
        except OSError as exc:
            raise ConfigError(f"Cannot read config file {path}: {exc}") from exc
        except yaml.YAMLError as exc:
            raise ConfigError(f"Malformed YAML in {path}: {exc}") from exc

        if data is None:
            raise ConfigError(f"Empty or invalid YAML file: {path}")

        if not isinstance(data, dict):
            raise ConfigError(f"YAML file must contain a dictionary: {path}")

        self._config_cache[filename] = data
        return data

    @classmethod
    def _deep_merge_dicts(cls, base_dict, override_dict):
        """Recursively merge two dictionaries"""
        merged = base_dict.copy()
        for key in override_dict:
            if key in merged and isinstance(merged[key], dict) and isinstance(override_dict[key], dict):
                merged[key] = cls._deep_merge_dicts(merged[key], override_dict[key])
            else:
                merged[key] = override_dict[key]

        return merged

    @staticmethod
    def _with_suffix(name):
        return name if name.endswith((".yaml", ".yml")) else f"{name}.yaml"

    @staticmethod
    def _is_config_file(filename):
        return filename.endswith(('.yaml', '.yml'))
