"""
Configuration Management
========================

Hierarchical configuration with support for:
- Built-in defaults reproducing the reference experiment
  (``M*s = 450``, ``s = 1``, ``dt = 2``, two curve loops per half-window,
  ``alpha = 0.05``)
- YAML or JSON configuration files
- Environment variables
- Dotted-key overrides (``--set detector.h=64``)

Usage:
    from qpcd.config import Config

    config = Config.load('config/default.yaml')
    config.apply_overrides(['bootstrap.replications=200'])
    alpha = config.get('bootstrap.alpha')
"""

import copy
import json
import logging
import os
from pathlib import Path
from typing import Any, Dict, Iterable, Optional, Union

import yaml

from .exceptions import ConfigurationException

logger = logging.getLogger(__name__)

ARRHYTHMIA_SHARE = 0.5 / 6


class Config:
    """
    Configuration manager with file, environment and override layers.

    Priority (lowest to highest):
    1. ``DEFAULTS``
    2. Configuration file
    3. Environment variables
    4. ``apply_overrides`` / explicit ``set`` calls
    """

    DEFAULTS: Dict[str, Any] = {
        'seed': 0,
        'signal': {
            'sample_rate': 360.0,
            'heart_rate_bpm': 48.0,
            'wavelet_order': 4,
            'noise_mu': 0.0,
            'noise_sigma': 0.02,
        },
        'embed': {
            'M': 450,
            's': 1,
            'dt': 2,
        },
        'pca': {
            'dim': 3,
        },
        'detector': {
            'loops_per_half': 2,
            'period_samples': None,  # None: M * s
            'h': None,               # None: loops_per_half * points_per_loop
            'stride': 1,
            'use_exact': None,       # None: exact solver iff h <= 32
        },
        'ot': {
            'p': 2.0,
            'epsilon': None,         # None: epsilon_scale * mean(C)
            'epsilon_scale': 0.01,
            'max_iter': 10000,
            'tol': 1e-6,
        },
        'bootstrap': {
            'replications': 500,
            'block_len': None,       # None: points_per_loop / 16
            'alpha': 0.05,
            'weight_scheme': 'exponential',
            'shuffle_blocks': True,
            'max_redraws': 100,
        },
        'corpus': {
            'count': 42,
            'beats': 24,
            'arrhythmia_beats_min': 3,
            'arrhythmia_beats_max': 6,
            'mix': {
                'normal': 0.5,
                'atrial_flutter': ARRHYTHMIA_SHARE,
                'atrial_fibrillation': ARRHYTHMIA_SHARE,
                'supraventricular_tachycardia': ARRHYTHMIA_SHARE,
                'premature_atrial_contraction': ARRHYTHMIA_SHARE,
                'ventricular_rhythm': ARRHYTHMIA_SHARE,
                'random_anomaly': ARRHYTHMIA_SHARE,
            },
        },
        'runtime': {
            'threads': 1,
        },
        'logging': {
            'level': 'INFO',
            'file': None,
            'json_format': False,
            'max_bytes': 10 * 1024 * 1024,  # 10MB
            'backup_count': 5,
        },
    }

    # Maps config keys to environment variable names
    ENV_VARS = {
        'runtime.threads': 'QPCD_THREADS',
        'logging.level': 'QPCD_LOG_LEVEL',
        'logging.file': 'QPCD_LOG_FILE',
        'seed': 'QPCD_SEED',
    }

    def __init__(self, config_data: Optional[dict] = None):
        """
        Args:
            config_data: Configuration dictionary (merged over defaults)
        """
        self._config = self._deep_merge(copy.deepcopy(self.DEFAULTS), config_data or {})

    @classmethod
    def load(cls, config_file: Optional[Union[str, Path]] = None, use_env: bool = True) -> 'Config':
        """
        Load configuration from a YAML or JSON file.

        Args:
            config_file: Path to the config file (optional)
            use_env: Apply environment variable overrides

        Returns:
            Config instance

        Raises:
            ConfigurationException: If the config file is invalid
        """
        config_data = {}

        if config_file:
            config_path = Path(config_file)
            if not config_path.exists():
                logger.warning(f"Config file not found: {config_file}, using defaults")
            else:
                try:
                    with open(config_path, 'r', encoding='utf-8') as f:
                        if config_path.suffix.lower() == '.json':
                            file_config = json.load(f)
                        else:
                            file_config = yaml.safe_load(f)
                except (yaml.YAMLError, json.JSONDecodeError) as e:
                    raise ConfigurationException(
                        f"Invalid YAML/JSON in config file: {config_file}",
                        details={'error': str(e)}
                    )
                except OSError as e:
                    raise ConfigurationException(
                        f"Error loading config file: {config_file}",
                        details={'error': str(e)}
                    )
                if file_config is not None and not isinstance(file_config, dict):
                    raise ConfigurationException(
                        f"Config file must contain a mapping: {config_file}",
                        details={'type': type(file_config).__name__}
                    )
                config_data = file_config or {}
                logger.info(f"Loaded configuration from {config_file}")

        config = cls(config_data)
        if use_env:
            config._load_env_vars()
        return config

    def save(self, path: Union[str, Path]) -> Path:
        """Write the configuration as canonical JSON (sorted keys)."""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, 'w', encoding='utf-8') as f:
            json.dump(self._config, f, indent=2, sort_keys=True)
            f.write('\n')
        return path

    def _load_env_vars(self):
        """Load configuration from environment variables."""
        for config_key, env_var in self.ENV_VARS.items():
            env_value = os.getenv(env_var)
            if env_value is not None:
                self.set(config_key, env_value)
                logger.debug(f"Loaded {config_key} from environment variable {env_var}")

    def get(self, key: str, default: Any = None) -> Any:
        """
        Get configuration value by dot-notation key.

        Args:
            key: Configuration key (e.g., 'bootstrap.alpha')
            default: Default value if key not found
        """
        value = self._config
        for k in key.split('.'):
            if isinstance(value, dict) and k in value:
                value = value[k]
            else:
                return default
        return value

    def has(self, key: str) -> bool:
        sentinel = object()
        return self.get(key, sentinel) is not sentinel

    def set(self, key: str, value: Any):
        """
        Set configuration value by dot-notation key, coercing strings
        toward the type of the key's default.
        """
        keys = key.split('.')
        config = self._config
        for k in keys[:-1]:
            if k not in config or not isinstance(config[k], dict):
                config[k] = {}
            config = config[k]
        config[keys[-1]] = self._convert_type(key, value, self._default(key))

    def _default(self, key: str) -> Any:
        """Built-in default for ``key``; None for keys without one."""
        value = self.DEFAULTS
        for k in key.split('.'):
            if not isinstance(value, dict) or k not in value:
                return None
            value = value[k]
        return value

    def apply_overrides(self, overrides: Iterable[str]):
        """
        Apply ``KEY=VAL`` overrides; keys must already exist.

        Raises:
            ConfigurationException: malformed pair or unknown key
        """
        for item in overrides:
            if '=' not in item:
                raise ConfigurationException("Override must look like KEY=VAL", {'override': item})
            key, raw = item.split('=', 1)
            key = key.strip()
            if not self.has(key):
                raise ConfigurationException("Unknown configuration key", {'key': key})
            self.set(key, raw.strip())

    def _convert_type(self, key: str, value: Any, reference: Any) -> Any:
        """
        Convert value to match the reference type.

        Strings aimed at keys whose default is None are parsed as YAML
        scalars, so ``"64"`` becomes 64 and ``"null"`` becomes None.
        """
        if not isinstance(value, str):
            if isinstance(reference, float) and isinstance(value, int) and not isinstance(value, bool):
                return float(value)
            return value

        if reference is None or isinstance(reference, dict):
            try:
                parsed = yaml.safe_load(value) if value.strip() else None
            except yaml.YAMLError:
                return value
            if isinstance(parsed, str):
                # YAML 1.1 reads exponent-only floats such as 1e-3 as strings
                try:
                    return float(parsed)
                except ValueError:
                    return parsed
            return parsed

        if isinstance(reference, bool):
            return value.lower() in ('true', '1', 'yes', 'on')

        if isinstance(reference, (int, float)):
            try:
                return type(reference)(value)
            except ValueError:
                raise ConfigurationException(
                    f"Could not convert value to {type(reference).__name__}",
                    details={'key': key, 'value': value}
                )

        if value.lower() in ('null', 'none', '~'):
            return None
        return value

    def _deep_merge(self, base: dict, override: dict) -> dict:
        """Deep merge two dictionaries."""
        result = base.copy()
        for key, value in override.items():
            if key in result and isinstance(result[key], dict) and isinstance(value, dict):
                result[key] = self._deep_merge(result[key], value)
            else:
                result[key] = value
        return result

    def to_dict(self) -> dict:
        """Deep copy of the configuration dictionary."""
        return copy.deepcopy(self._config)

    def validate(self):
        """
        Validate the sections owned by this class; domain parameters are
        checked when ``PipelineConfig`` is built from the config.

        Raises:
            ConfigurationException: If configuration is invalid
        """
        log_level = self.get('logging.level')
        valid_levels = ['DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL']
        if not isinstance(log_level, str) or log_level.upper() not in valid_levels:
            raise ConfigurationException(
                f"logging.level must be one of {valid_levels}",
                details={'value': log_level}
            )

        threads = self.get('runtime.threads')
        if not isinstance(threads, int) or isinstance(threads, bool):
            raise ConfigurationException(
                "runtime.threads must be an integer",
                details={'value': threads}
            )

        seed = self.get('seed')
        if not isinstance(seed, int) or isinstance(seed, bool):
            raise ConfigurationException("seed must be an integer", details={'value': seed})

        logger.debug("Configuration validation passed")

    def __eq__(self, other):
        return isinstance(other, Config) and self._config == other._config

    def __repr__(self):
        return f"Config({len(self._config)} sections)"
