# src/hnets/utils/config.py
import copy
import os
import yaml
from pathlib import Path
from typing import Dict, Any, Optional
from dotenv import load_dotenv

DEFAULT_CONFIG_PATH = Path(__file__).parents[3] / "config" / "default_config.yml"

# Environment overrides, applied after the YAML file
ENV_OVERRIDES = {
    "HNETS_TOLERANCE": ("tolerance", float),
    "HNETS_SEED": ("seed", int),
    "HNETS_SEARCH_BOUND": ("search_bound", int),
    "HNETS_LOG_LEVEL": ("log_level", str),
    "HNETS_OUTPUT_DIR": ("output_dir", str),
}

SKELETONS = ("nerve", "full")


class Config:
    def __init__(self, config_path: Optional[str] = None, overrides: Optional[Dict[str, Any]] = None):
        load_dotenv(dotenv_path=Path(__file__).parents[3] / ".env")
        self.config = self._load_config(config_path)
        for key, value in (overrides or {}).items():
            if value is not None:
                self._set(key, value)
        self._validate_config()

    def _load_config(self, config_path: Optional[str] = None) -> Dict[str, Any]:
        """Load configuration from defaults, a YAML file and environment variables."""
        # Default configuration
        config = {
            "tolerance": 1e-9,
            "seed": 0,
            "search_bound": 10 ** 7,
            "path_length_factor": 2,
            "intertwiner_max_dim": 32,
            "max_denominator": 10 ** 6,
            "output_dir": "output",
            "log_level": "INFO",
            "pi1": {
                "skeleton": "nerve",
            },
            "lattice": {
                "sites": 6,
                "gauge_n": 1,
                "max_len": 3,
            },
        }

        path = config_path or (str(DEFAULT_CONFIG_PATH) if DEFAULT_CONFIG_PATH.exists() else None)
        if config_path and not os.path.exists(config_path):
            raise ValueError(f"Configuration file not found: {config_path}")
        if path:
            with open(path, 'r') as f:
                file_config = yaml.safe_load(f)
                if file_config:
                    _merge(config, file_config)

        for env_key, (key, cast) in ENV_OVERRIDES.items():
            raw = os.getenv(env_key)
            if raw:
                try:
                    config[key] = cast(raw)
                except ValueError as e:
                    raise ValueError(f"Invalid value for {env_key}: {raw!r}") from e

        return config

    def _validate_config(self):
        """Validate configuration values."""
        problems = []
        if not float(self.get("tolerance")) > 0:
            problems.append("tolerance must be positive")
        if int(self.get("search_bound")) < 1:
            problems.append("search_bound must be at least 1")
        if int(self.get("path_length_factor")) < 1:
            problems.append("path_length_factor must be at least 1")
        if int(self.get("max_denominator")) < 1:
            problems.append("max_denominator must be at least 1")
        if self.get("pi1.skeleton") not in SKELETONS:
            problems.append(f"pi1.skeleton must be one of {', '.join(SKELETONS)}")
        if int(self.get("lattice.sites")) < 5:
            problems.append("lattice.sites must be at least 5")
        if int(self.get("lattice.gauge_n")) < 1:
            problems.append("lattice.gauge_n must be at least 1")
        max_len = int(self.get("lattice.max_len"))
        if not 1 <= max_len <= int(self.get("lattice.sites")) - 2:
            problems.append("lattice.max_len must lie between 1 and lattice.sites - 2")

        if problems:
            raise ValueError(f"Invalid configuration: {'; '.join(problems)}")

    def _set(self, key: str, value: Any):
        node = self.config
        *parents, leaf = key.split(".")
        for part in parents:
            node = node.setdefault(part, {})
        node[leaf] = value

    def __getitem__(self, key: str) -> Any:
        value = self.get(key, _MISSING)
        if value is _MISSING:
            raise KeyError(key)
        return value

    def get(self, key: str, default: Any = None) -> Any:
        """Look up ``key``; dotted keys walk into nested sections."""
        node: Any = self.config
        for part in key.split("."):
            if not isinstance(node, dict) or part not in node:
                return default
            node = node[part]
        return node

    @property
    def tolerance(self) -> float:
        return float(self.config["tolerance"])

    @property
    def seed(self) -> int:
        return int(self.config["seed"])


_MISSING = object()


def _merge(base: Dict[str, Any], update: Dict[str, Any]):
    for key, value in update.items():
        if isinstance(value, dict) and isinstance(base.get(key), dict):
            _merge(base[key], value)
        else:
            base[key] = copy.deepcopy(value)
