"""
Pytest configuration and shared fixtures for the test suite.

Provides small synthetic signals, desk-scale configurations and the
environment needed to run the CLI as ``python -m qpcd``.
"""

import os
import shutil
import sys
import tempfile
from pathlib import Path
from typing import List

import numpy as np
import pytest
from hypothesis import settings

from qpcd.config import Config
from qpcd.pipeline import PipelineConfig
from qpcd.signal import AnnotatedSeries, Annotation, synthesize_plain_periodic

FIXTURES_DIR = Path(__file__).parent / 'fixtures'
SRC_DIR = Path(__file__).resolve().parents[1] / 'src'

# Period of 8 samples: one curve loop is 8 cloud points with dt=1.
SMALL_PERIOD = 8
SMALL_RATE = 40.0
SMALL_OVERRIDES: List[str] = [
    'embed.M=8',
    'embed.s=1',
    'embed.dt=1',
    'detector.h=16',
    'bootstrap.replications=100',
    'bootstrap.block_len=1',
]


# ============================================================================
# Signal Fixtures
# ============================================================================

def periodic_with_burst(
    n_periods: int = 80,
    burst_start_period: int = 40,
    burst_periods: int = 2,
    gain: float = 3.0,
    noise_sigma: float = 0.05,
    seed: int = 0
) -> AnnotatedSeries:
    """Sine of period 8 samples whose amplitude is multiplied by ``gain`` for a few periods."""
    base = synthesize_plain_periodic(
        SMALL_RATE / SMALL_PERIOD,
        n_periods * SMALL_PERIOD,
        SMALL_RATE,
        noise_sigma=noise_sigma,
        seed=seed,
    )
    samples = base.samples.copy()
    start = burst_start_period * SMALL_PERIOD
    end = start + burst_periods * SMALL_PERIOD
    samples[start:end] *= gain
    return base.replace_samples(samples, [Annotation(start, end, 'burst')])


@pytest.fixture
def sine_series():
    """Noisy sine with an 8-sample period and no change."""
    return synthesize_plain_periodic(
        SMALL_RATE / SMALL_PERIOD, 80 * SMALL_PERIOD, SMALL_RATE, noise_sigma=0.05, seed=1
    )


@pytest.fixture
def burst_series():
    """Same sine with a threefold amplitude burst lasting two periods."""
    return periodic_with_burst()


@pytest.fixture
def burst_factory():
    """``periodic_with_burst`` for tests that need several seeded draws."""
    return periodic_with_burst


@pytest.fixture
def constant_series():
    return AnnotatedSeries(samples=np.full(200, 0.7), sample_rate=SMALL_RATE, name='constant')


# ============================================================================
# Configuration Fixtures
# ============================================================================

@pytest.fixture
def small_config():
    """Config with desk-scale overrides and no environment influence."""
    config = Config.load(use_env=False)
    config.apply_overrides(SMALL_OVERRIDES)
    return config


@pytest.fixture
def small_pipeline(small_config):
    return PipelineConfig.from_config(small_config)


@pytest.fixture
def small_set_args():
    """``--set`` arguments carrying the desk-scale overrides to the CLI."""
    return [arg for item in SMALL_OVERRIDES for arg in ('--set', item)]


# ============================================================================
# Temporary Directory Fixtures
# ============================================================================

@pytest.fixture
def temp_dir():
    """Create a temporary directory for test files."""
    temp_path = tempfile.mkdtemp()
    yield Path(temp_path)
    if os.path.exists(temp_path):
        shutil.rmtree(temp_path)


@pytest.fixture
def fixtures_dir():
    return FIXTURES_DIR


# ============================================================================
# CLI Fixtures
# ============================================================================

@pytest.fixture
def cli_env():
    """Environment for running ``python -m qpcd`` from a source checkout."""
    env = {k: v for k, v in os.environ.items() if not k.startswith('QPCD_')}
    env['PYTHONPATH'] = os.pathsep.join(filter(None, [str(SRC_DIR), env.get('PYTHONPATH')]))
    env['QPCD_LOG_LEVEL'] = 'WARNING'
    return env


@pytest.fixture
def qpcd_command():
    return [sys.executable, '-m', 'qpcd']


# ============================================================================
# Hypothesis Profiles
# ============================================================================

settings.register_profile("qpcd", max_examples=50, deadline=None)
settings.load_profile("qpcd")
