"""Unit tests for configuration management module."""

import json

import pytest

from qpcd.bootstrap import WeightScheme
from qpcd.config import Config
from qpcd.exceptions import ConfigurationException
from qpcd.pipeline import PipelineConfig


@pytest.mark.unit
class TestConfig:
    """Test suite for Config class."""

    def test_default_configuration(self):
        """Defaults reproduce the reference experiment."""
        config = Config()

        assert config.get('embed.M') == 450
        assert config.get('embed.s') == 1
        assert config.get('embed.dt') == 2
        assert config.get('pca.dim') == 3
        assert config.get('bootstrap.alpha') == 0.05
        assert config.get('bootstrap.replications') == 500
        assert config.get('logging.level') == 'INFO'

    def test_default_mix_sums_to_one(self):
        mix = Config().get('corpus.mix')
        assert mix['normal'] == 0.5
        assert sum(mix.values()) == pytest.approx(1.0)

    def test_get_with_default(self):
        """Test getting non-existent value with default."""
        assert Config().get('nonexistent.key', default=42) == 42

    def test_has(self):
        config = Config()
        assert config.has('detector.h')
        assert not config.has('detector.window')

    def test_set_nested_value(self):
        """Test setting nested configuration values."""
        config = Config()

        config.set('custom.nested.value', 'test')
        assert config.get('custom.nested.value') == 'test'

    def test_load_from_yaml(self, temp_dir):
        """Test loading configuration from YAML file."""
        path = temp_dir / 'config.yaml'
        path.write_text(
            "embed:\n"
            "  M: 40\n"
            "bootstrap:\n"
            "  alpha: 0.1\n"
        )

        config = Config.load(path, use_env=False)

        assert config.get('embed.M') == 40
        assert config.get('embed.dt') == 2
        assert config.get('bootstrap.alpha') == 0.1

    def test_load_nonexistent_file(self):
        """Test loading from non-existent file uses defaults."""
        config = Config.load('/nonexistent/path/config.yaml', use_env=False)
        assert config.get('embed.M') == 450

    def test_load_invalid_yaml(self, temp_dir):
        """Test loading invalid YAML raises exception."""
        path = temp_dir / 'broken.yaml'
        path.write_text("invalid: yaml: content:")

        with pytest.raises(ConfigurationException):
            Config.load(path)

    def test_load_non_mapping(self, temp_dir):
        path = temp_dir / 'list.yaml'
        path.write_text("- 1\n- 2\n")

        with pytest.raises(ConfigurationException):
            Config.load(path)

    def test_shipped_default_file_matches_defaults(self, fixtures_dir):
        config = Config.load(fixtures_dir.parents[1] / 'config' / 'default.yaml', use_env=False)
        assert config == Config()

    def test_environment_variable_override(self, monkeypatch):
        """Test environment variable overrides."""
        monkeypatch.setenv('QPCD_THREADS', '4')
        monkeypatch.setenv('QPCD_LOG_LEVEL', 'DEBUG')
        monkeypatch.setenv('QPCD_SEED', '7')

        config = Config.load()

        assert config.get('runtime.threads') == 4
        assert config.get('logging.level') == 'DEBUG'
        assert config.get('seed') == 7

    def test_environment_ignored_when_disabled(self, monkeypatch):
        monkeypatch.setenv('QPCD_THREADS', '4')
        assert Config.load(use_env=False).get('runtime.threads') == 1

    def test_type_conversion_int(self):
        """Test automatic type conversion for integers."""
        config = Config()

        config.set('embed.M', '40')
        assert config.get('embed.M') == 40
        assert isinstance(config.get('embed.M'), int)

    def test_type_conversion_float(self):
        config = Config()

        config.set('bootstrap.alpha', '0.01')
        assert config.get('bootstrap.alpha') == 0.01
        assert isinstance(config.get('bootstrap.alpha'), float)

    def test_type_conversion_bool(self):
        """Test automatic type conversion for booleans."""
        config = Config()

        config.set('bootstrap.shuffle_blocks', 'false')
        assert config.get('bootstrap.shuffle_blocks') is False

        config.set('bootstrap.shuffle_blocks', '1')
        assert config.get('bootstrap.shuffle_blocks') is True

    def test_none_default_parsed_as_yaml(self):
        """Keys that default to None take YAML scalars."""
        config = Config()

        config.set('detector.h', '64')
        assert config.get('detector.h') == 64

        config.set('detector.use_exact', 'true')
        assert config.get('detector.use_exact') is True

        config.set('detector.h', 'null')
        assert config.get('detector.h') is None

    def test_bad_number(self):
        with pytest.raises(ConfigurationException):
            Config().set('embed.M', 'many')

    def test_apply_overrides(self):
        config = Config()
        config.apply_overrides(['embed.M=8', 'bootstrap.weight_scheme = multinomial'])

        assert config.get('embed.M') == 8
        assert config.get('bootstrap.weight_scheme') == 'multinomial'

    def test_override_unknown_key(self):
        with pytest.raises(ConfigurationException) as exc_info:
            Config().apply_overrides(['embed.N=8'])

        assert 'embed.N' in str(exc_info.value)

    def test_override_without_equals(self):
        with pytest.raises(ConfigurationException):
            Config().apply_overrides(['embed.M'])

    def test_save_and_load(self, temp_dir):
        config = Config()
        config.apply_overrides(['seed=11', 'detector.h=64'])

        path = config.save(temp_dir / 'out' / 'config.json')

        assert json.loads(path.read_text())['seed'] == 11
        assert Config.load(path, use_env=False) == config

    def test_saved_json_keeps_small_floats(self, temp_dir):
        path = Config().save(temp_dir / 'config.json')
        assert '1e-06' in path.read_text()

        loaded = Config.load(path, use_env=False)

        assert loaded.get('ot.tol') == 1e-6
        assert isinstance(loaded.get('ot.tol'), float)

    def test_invalid_json_file(self, temp_dir):
        config_file = temp_dir / 'bad.json'
        config_file.write_text('{"seed": 1,,}')

        with pytest.raises(ConfigurationException):
            Config.load(config_file, use_env=False)

    def test_override_back_to_null(self):
        """Coercion follows the built-in default, not the value set last."""
        config = Config()
        config.apply_overrides(['detector.h=64', 'detector.h=null', 'detector.use_exact=false'])

        assert config.get('detector.h') is None
        assert config.get('detector.use_exact') is False

    def test_exponent_float_on_null_default(self):
        config = Config()
        config.apply_overrides(['ot.epsilon=1e-3'])

        assert config.get('ot.epsilon') == pytest.approx(1e-3)

    def test_validate_success(self):
        """Test configuration validation passes for valid config."""
        Config().validate()

    def test_validate_invalid_log_level(self):
        """Test validation fails for invalid log level."""
        config = Config()
        config.set('logging.level', 'INVALID')

        with pytest.raises(ConfigurationException):
            config.validate()

    def test_validate_invalid_threads(self):
        config = Config({'runtime': {'threads': 'many'}})

        with pytest.raises(ConfigurationException):
            config.validate()

    def test_to_dict_is_a_copy(self):
        config = Config()
        config_dict = config.to_dict()
        config_dict['embed']['M'] = 1

        assert config.get('embed.M') == 450

    def test_deep_merge(self):
        """Test deep merging of configurations."""
        base = {'a': {'b': 1, 'c': 2}, 'd': 3}
        override = {'a': {'b': 10}, 'e': 4}

        result = Config()._deep_merge(base, override)

        assert result['a']['b'] == 10  # Overridden
        assert result['a']['c'] == 2   # Preserved
        assert result['d'] == 3        # Preserved
        assert result['e'] == 4        # Added


@pytest.mark.unit
class TestPipelineConfig:
    """Test suite for the typed pipeline view."""

    def test_derived_defaults(self):
        """Two loops per half, sixteen blocks per loop, Sinkhorn at this size."""
        pcfg = PipelineConfig.from_config(Config())

        assert pcfg.period_samples == 450
        assert pcfg.detector.h == 450
        assert pcfg.bootstrap.block_len == 14
        assert not pcfg.detector.exact
        assert pcfg.bootstrap.weight_scheme is WeightScheme.EXPONENTIAL
        assert pcfg.bootstrap.shuffle_blocks
        assert pcfg.pca_dim == 3
        assert pcfg.detector.ot.epsilon_scale == 0.01

    def test_explicit_values_win(self, small_pipeline):
        assert small_pipeline.detector.h == 16
        assert small_pipeline.bootstrap.block_len == 1
        assert small_pipeline.detector.exact
        assert small_pipeline.period_samples == 8

    def test_explicit_block_len_wins(self):
        config = Config()
        config.apply_overrides(['bootstrap.block_len=30'])

        assert PipelineConfig.from_config(config).bootstrap.block_len == 30

    def test_period_override_drives_window(self):
        config = Config()
        config.apply_overrides(['detector.period_samples=300'])

        pcfg = PipelineConfig.from_config(config)

        assert pcfg.detector.h == 300
        assert pcfg.bootstrap.block_len == 9

    def test_seed_reaches_bootstrap_and_synthesis(self):
        config = Config()
        config.set('seed', 99)

        pcfg = PipelineConfig.from_config(config)

        assert pcfg.bootstrap.seed == 99
        assert pcfg.synthesis.seed == 99

    @pytest.mark.parametrize("override", [
        'embed.M=0',
        'pca.dim=452',
        'pca.dim=0',
        'bootstrap.replications=10',
        'bootstrap.alpha=1.5',
        'bootstrap.weight_scheme=poisson',
        'detector.loops_per_half=0',
        'ot.p=0.5',
        'signal.heart_rate_bpm=300',
        'corpus.count=-1',
    ])
    def test_invalid_values(self, override):
        config = Config()
        config.apply_overrides([override])

        with pytest.raises(ConfigurationException):
            PipelineConfig.from_config(config)

    def test_to_dict_echo(self, small_pipeline):
        echo = small_pipeline.to_dict()

        assert echo['embed'] == {'M': 8, 's': 1, 'dt': 1}
        assert echo['detector']['h'] == 16
        assert echo['bootstrap']['weight_scheme'] == 'exponential'
        json.dumps(echo)
