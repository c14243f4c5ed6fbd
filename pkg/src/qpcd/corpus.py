"""
Synthetic Corpus Generation
===========================

Writes a directory of annotated ECG-like series plus ``manifest.json``.

Each entry is a normal rhythm; positive entries carry exactly one
arrhythmia lasting a seeded number of beats at a seeded position at least
two beats away from either end. Kinds are allocated from the mix
fractions by largest remainder and then shuffled, so the corpus is a pure
function of ``(seed, count, mix, synthesis parameters)``.

Usage:
    from qpcd.corpus import generate_corpus

    manifest = generate_corpus('corpus', pipeline_config, count=42)
"""

import json
import logging
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import TYPE_CHECKING, Any, Dict, List, Mapping, Optional, Union

import numpy as np

from .exceptions import ConfigurationException, SignalException
from .parallel import ordered_map
from .signal import (
    AnnotatedSeries,
    ArrhythmiaKind,
    ArrhythmiaSpec,
    SynthesisParams,
    inject_arrhythmia,
    save_csv,
    synthesize_normal,
)

if TYPE_CHECKING:
    from .pipeline import PipelineConfig

logger = logging.getLogger(__name__)

MANIFEST_NAME = 'manifest.json'
MANIFEST_VERSION = 1
NORMAL = 'normal'
EDGE_BEATS = 2
MIX_TOLERANCE = 1e-6
SEED_MASK = 0xFFFFFFFFFFFFFFFF


@dataclass(frozen=True)
class CorpusSettings:
    """Size and composition of a generated corpus."""
    count: int = 42
    beats: int = 24
    arrhythmia_beats_min: int = 3
    arrhythmia_beats_max: int = 6
    mix: Mapping[str, float] = field(default_factory=lambda: {NORMAL: 1.0})

    def validate(self) -> None:
        if self.count < 0:
            raise ConfigurationException("corpus.count must be >= 0", {'key': 'corpus.count', 'value': self.count})
        if not 1 <= self.arrhythmia_beats_min <= self.arrhythmia_beats_max:
            raise ConfigurationException(
                "Arrhythmia length must satisfy 1 <= min <= max beats",
                {'min': self.arrhythmia_beats_min, 'max': self.arrhythmia_beats_max}
            )
        if self.beats < self.arrhythmia_beats_max + 2 * EDGE_BEATS:
            raise ConfigurationException(
                "corpus.beats too small to place an arrhythmia away from the edges",
                {'key': 'corpus.beats', 'value': self.beats}
            )
        validate_mix(self.mix)


def validate_mix(mix: Mapping[str, float]) -> None:
    """
    Raises:
        ConfigurationException: unknown kind, negative fraction, or
            fractions not summing to 1
    """
    known = {NORMAL} | {kind.value for kind in ArrhythmiaKind}
    for key, value in mix.items():
        if key not in known:
            raise ConfigurationException("Unknown corpus mix entry", {'key': f'corpus.mix.{key}'})
        if value is None or value < 0:
            raise ConfigurationException(
                "Mix fractions must be >= 0",
                {'key': f'corpus.mix.{key}', 'value': value}
            )
    total = sum(mix.values())
    if abs(total - 1.0) > MIX_TOLERANCE:
        raise ConfigurationException("Mix fractions must sum to 1", {'sum': round(total, 9)})


def allocate_mix(count: int, mix: Mapping[str, float]) -> List[str]:
    """
    Exactly ``count`` kind labels in mix order, by largest remainder.

    Ties go to the entry listed first.
    """
    validate_mix(mix)
    keys = list(mix)
    quotas = [count * mix[k] for k in keys]
    allotted = [math.floor(q) for q in quotas]
    by_remainder = sorted(range(len(keys)), key=lambda i: (-(quotas[i] - allotted[i]), i))
    for i in by_remainder[:count - sum(allotted)]:
        allotted[i] += 1
    return [k for k, n in zip(keys, allotted) for _ in range(n)]


def entry_seed(seed: int, index: int) -> int:
    """Per-entry seed derived from the corpus seed (fits in a signed 64-bit int)."""
    state = np.random.SeedSequence([seed & SEED_MASK, index]).generate_state(1, np.uint64)[0]
    return int(state) >> 1


def synthesize_entry(kind: str, params: SynthesisParams, settings: CorpusSettings) -> AnnotatedSeries:
    """One corpus series; ``params.seed`` drives noise, placement and waveform."""
    series = synthesize_normal(params)
    if kind == NORMAL:
        return series

    period = params.period_samples
    rng = np.random.default_rng([params.seed, len(series)])
    beats = int(rng.integers(settings.arrhythmia_beats_min, settings.arrhythmia_beats_max + 1))
    length = beats * period
    lowest = EDGE_BEATS * period
    highest = len(series) - length - EDGE_BEATS * period
    start = int(rng.integers(lowest, highest + 1))
    return inject_arrhythmia(series, ArrhythmiaSpec(ArrhythmiaKind(kind), start, length), params)


def generate_corpus(
    directory: Union[str, Path],
    config: 'PipelineConfig',
    count: Optional[int] = None,
    mix: Optional[Mapping[str, float]] = None,
    n_jobs: int = 1
) -> Dict[str, Any]:
    """
    Generate ``count`` series into ``directory`` and write the manifest.

    Returns:
        The manifest dictionary

    Raises:
        ConfigurationException: invalid mix or settings
        SignalException: output directory not writable
    """
    settings = config.corpus
    if count is not None:
        settings = replace(settings, count=count)
    if mix is not None:
        settings = replace(settings, mix=dict(mix))
    settings.validate()

    directory = Path(directory)
    try:
        directory.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise SignalException("Output directory not writable", {'path': str(directory), 'error': str(e)})

    kinds = allocate_mix(settings.count, settings.mix)
    order = np.random.default_rng([config.seed & SEED_MASK, settings.count]).permutation(len(kinds))
    kinds = [kinds[i] for i in order]

    base = replace(config.synthesis, duration_samples=settings.beats * config.synthesis.period_samples)

    def build(index: int) -> Dict[str, Any]:
        kind = kinds[index]
        params = replace(base, seed=entry_seed(config.seed, index))
        name = f"series_{index:03d}"
        series = replace(synthesize_entry(kind, params, settings), name=name)
        filename = f"{name}.csv"
        try:
            save_csv(series, directory / filename)
        except OSError as e:
            raise SignalException("Could not write series", {'path': str(directory / filename), 'error': str(e)})
        return {
            'name': name,
            'file': filename,
            'seed': params.seed,
            'kind': kind,
            'annotations': [[a.start, a.end, a.label] for a in series.annotations],
        }

    entries = ordered_map(build, range(len(kinds)), n_jobs)
    manifest = {
        'version': MANIFEST_VERSION,
        'seed': config.seed,
        'count': settings.count,
        'mix': dict(settings.mix),
        'sample_rate': base.sample_rate,
        'heart_rate_bpm': base.heart_rate_bpm,
        'beats': settings.beats,
        'series': entries,
    }
    write_manifest(directory, manifest)

    positives = sum(1 for e in entries if e['kind'] != NORMAL)
    logger.info(
        f"Generated {len(entries)} series in {directory} ({positives} with arrhythmia)",
        extra={'extra_fields': {'seed': config.seed, 'count': settings.count}}
    )
    return manifest


def write_manifest(directory: Union[str, Path], manifest: Dict[str, Any]) -> Path:
    path = Path(directory) / MANIFEST_NAME
    with open(path, 'w', encoding='utf-8') as f:
        json.dump(manifest, f, indent=2, sort_keys=True)
        f.write('\n')
    return path


def load_manifest(directory: Union[str, Path]) -> Dict[str, Any]:
    """
    Raises:
        SignalException: manifest missing or unreadable
    """
    path = Path(directory) / MANIFEST_NAME
    try:
        with open(path, 'r', encoding='utf-8') as f:
            return json.load(f)
    except FileNotFoundError:
        raise SignalException("Corpus manifest not found", {'path': str(path)})
    except (OSError, json.JSONDecodeError) as e:
        raise SignalException("Corpus manifest unreadable", {'path': str(path), 'error': str(e)})
