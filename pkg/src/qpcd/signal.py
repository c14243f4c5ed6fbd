"""
Signal Data Model, CSV Ingestion and Synthesis
==============================================

Everything that produces an ``AnnotatedSeries``:

- ``load_csv`` / ``save_csv`` for recordings exported as CSV
- ``synthesize_normal`` for a noisy normal sinus rhythm built from
  Daubechies scaling-function atoms (one P, Q, R, S, T atom each)
- ``inject_arrhythmia`` for replacing a stretch of a series with one of
  six arrhythmia presets and recording the ground truth
- ``synthesize_plain_periodic`` for sine fixtures under the null hypothesis

Every synthesis routine is a pure function of its arguments; random
streams are derived from the seed and never shared between calls.

Usage:
    from qpcd.signal import SynthesisParams, synthesize_normal

    params = SynthesisParams(heart_rate_bpm=60, duration_samples=7200, seed=7)
    series = synthesize_normal(params)
"""

import json
import logging
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from functools import lru_cache
from pathlib import Path
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
import pywt
from scipy import signal as scipy_signal

from .exceptions import (
    AnnotationException,
    CsvFormatException,
    SignalException,
    SynthesisException,
)

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

MIN_HEART_RATE_BPM = 40.0
MAX_HEART_RATE_BPM = 220.0
CSV_COLUMNS = ('index', 'value', 'ann_start', 'ann_end', 'ann_label')


class Annotation(NamedTuple):
    """Half-open ground-truth interval ``[start, end)`` with a label."""
    start: int
    end: int
    label: str


@dataclass(frozen=True, eq=False)
class AnnotatedSeries:
    """
    Raw 1-D signal with its sampling rate and ground-truth intervals.

    ``samples`` is stored as a read-only float array. Annotations must lie
    inside the series and must not overlap each other.
    """
    samples: np.ndarray
    sample_rate: float
    annotations: List[Annotation] = field(default_factory=list)
    name: str = "series"

    def __post_init__(self):
        samples = np.array(self.samples, dtype=float).reshape(-1)
        if samples.size == 0:
            raise SignalException("Series has no samples", {'name': self.name})
        if not self.sample_rate > 0:
            raise SignalException(
                "sample_rate must be positive",
                {'name': self.name, 'sample_rate': self.sample_rate}
            )
        samples.setflags(write=False)
        object.__setattr__(self, 'samples', samples)

        annotations = [Annotation(int(a[0]), int(a[1]), str(a[2])) for a in self.annotations]
        for ann in annotations:
            if not 0 <= ann.start < ann.end <= samples.size:
                raise AnnotationException(
                    "Annotation interval out of bounds",
                    {'interval': tuple(ann), 'length': samples.size}
                )
        ordered = sorted(annotations)
        for prev, cur in zip(ordered, ordered[1:]):
            if cur.start < prev.end:
                raise AnnotationException(
                    "Annotation intervals overlap",
                    {'first': tuple(prev), 'second': tuple(cur)}
                )
        object.__setattr__(self, 'annotations', annotations)

    def __len__(self) -> int:
        return int(self.samples.size)

    @property
    def duration_seconds(self) -> float:
        return len(self) / self.sample_rate

    def replace_samples(
        self,
        samples: np.ndarray,
        annotations: Optional[Sequence[Annotation]] = None
    ) -> 'AnnotatedSeries':
        """Return a copy with new samples (and optionally new annotations)."""
        return AnnotatedSeries(
            samples=samples,
            sample_rate=self.sample_rate,
            annotations=list(self.annotations if annotations is None else annotations),
            name=self.name,
        )


# ============================================================================
# CSV ingestion
# ============================================================================

@dataclass(frozen=True)
class CsvFormat:
    """
    Column layout of a series CSV.

    ``sample_rate`` is supplied out-of-band; when it is None the loader
    reads the sidecar ``<stem>.json`` (``{"sample_rate": 360.0}``).
    Files without a header are read positionally in ``CSV_COLUMNS`` order.
    """
    index_column: str = 'index'
    value_column: str = 'value'
    ann_start_column: str = 'ann_start'
    ann_end_column: str = 'ann_end'
    ann_label_column: str = 'ann_label'
    sample_rate: Optional[float] = None
    name: Optional[str] = None

    @property
    def positional_columns(self) -> Tuple[str, ...]:
        return (
            self.index_column,
            self.value_column,
            self.ann_start_column,
            self.ann_end_column,
            self.ann_label_column,
        )


def sidecar_path(path: PathLike) -> Path:
    """Path of the JSON sidecar that carries the sample rate."""
    return Path(path).with_suffix('.json')


def _read_sample_rate(path: Path, fmt: CsvFormat) -> float:
    if fmt.sample_rate is not None:
        return float(fmt.sample_rate)

    sidecar = sidecar_path(path)
    if not sidecar.exists():
        raise CsvFormatException(
            "Sample rate not supplied and no sidecar JSON found",
            details={'path': str(path), 'sidecar': str(sidecar)}
        )
    try:
        with open(sidecar, 'r', encoding='utf-8') as f:
            return float(json.load(f)['sample_rate'])
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as e:
        raise CsvFormatException(
            "Invalid sidecar JSON",
            details={'sidecar': str(sidecar), 'error': str(e)}
        )


def _frame_with_columns(raw: pd.DataFrame, fmt: CsvFormat) -> Tuple[pd.DataFrame, int]:
    """Name the columns of a header-less read; returns (frame, first data line number)."""
    first_row = [cell.strip() for cell in raw.iloc[0].tolist()] if len(raw) else []
    if fmt.value_column in first_row:
        frame = raw.iloc[1:].reset_index(drop=True)
        frame.columns = first_row
        return frame, 2

    if raw.shape[1] == 1:
        names = [fmt.value_column]
    else:
        names = list(fmt.positional_columns[:raw.shape[1]])
        if raw.shape[1] > len(names):
            raise CsvFormatException(
                "Too many columns for a header-less file",
                details={'columns': raw.shape[1]}
            )
    frame = raw.copy()
    frame.columns = names
    return frame, 1


def _parse_values(cells: List[str], first_line: int) -> np.ndarray:
    values = np.empty(len(cells))
    for offset, cell in enumerate(cells):
        try:
            values[offset] = float(cell)
        except ValueError:
            raise CsvFormatException(
                f"Non-numeric value at row {first_line + offset}",
                row=first_line + offset,
                details={'value': cell}
            )
    return values


def _parse_annotations(frame: pd.DataFrame, fmt: CsvFormat, first_line: int) -> List[Annotation]:
    if fmt.ann_start_column not in frame.columns:
        return []

    annotations: List[Annotation] = []
    starts = frame[fmt.ann_start_column].tolist()
    ends = frame[fmt.ann_end_column].tolist() if fmt.ann_end_column in frame else [''] * len(frame)
    if fmt.ann_label_column in frame:
        labels = frame[fmt.ann_label_column].tolist()
    else:
        labels = [''] * len(frame)

    for offset, (start, end, label) in enumerate(zip(starts, ends, labels)):
        if not str(start).strip():
            continue
        line = first_line + offset
        try:
            start_i, end_i = int(str(start).strip()), int(str(end).strip())
        except ValueError:
            raise CsvFormatException(
                f"Non-integer annotation bound at row {line}",
                row=line,
                details={'start': start, 'end': end}
            )
        if end_i < start_i:
            raise AnnotationException(
                f"interval end before start at row {line}",
                details={'start': start_i, 'end': end_i}
            )
        if end_i == start_i:
            raise AnnotationException(
                f"empty annotation interval at row {line}",
                details={'start': start_i, 'end': end_i}
            )
        annotations.append(Annotation(start_i, end_i, str(label).strip()))
    return annotations


def load_csv(path: PathLike, fmt: Optional[CsvFormat] = None) -> AnnotatedSeries:
    """
    Load a series from CSV.

    Annotation rows are rows whose ``ann_start`` cell is filled; they are
    returned as half-open index intervals in file order.

    Args:
        path: CSV file
        fmt: Column layout and sample rate (defaults to ``CsvFormat()``)

    Returns:
        AnnotatedSeries with row order preserved

    Raises:
        SignalException: File missing or empty
        CsvFormatException: Non-numeric value cell (reports the row number)
        AnnotationException: Interval reversed, empty, overlapping or out of bounds
    """
    fmt = fmt or CsvFormat()
    path = Path(path)
    if not path.exists():
        raise SignalException("CSV file not found", {'path': str(path)})

    try:
        raw = pd.read_csv(
            path,
            header=None,
            dtype=str,
            keep_default_na=False,
            skip_blank_lines=True,
            encoding='utf-8',
        )
    except pd.errors.EmptyDataError:
        raise SignalException("CSV file is empty", {'path': str(path)})
    except pd.errors.ParserError as e:
        raise CsvFormatException("Malformed CSV", details={'path': str(path), 'error': str(e)})

    raw = raw.fillna('')

    frame, first_line = _frame_with_columns(raw, fmt)
    if fmt.value_column not in frame.columns:
        raise CsvFormatException(
            "Value column missing",
            details={'path': str(path), 'column': fmt.value_column}
        )

    values = _parse_values([c.strip() for c in frame[fmt.value_column].tolist()], first_line)
    annotations = _parse_annotations(frame, fmt, first_line)
    sample_rate = _read_sample_rate(path, fmt)

    series = AnnotatedSeries(
        samples=values,
        sample_rate=sample_rate,
        annotations=annotations,
        name=fmt.name or path.stem,
    )
    logger.debug(
        f"Loaded {path.name}: {len(series)} samples, {len(annotations)} annotations",
        extra={'extra_fields': {'path': str(path), 'samples': len(series)}}
    )
    return series


def save_csv(series: AnnotatedSeries, path: PathLike) -> Path:
    """
    Write ``series`` as CSV plus the sample-rate sidecar.

    Values are written with ``repr`` so that ``load_csv`` reproduces them
    bitwise. The k-th annotation is stored on data row k.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)

    n = len(series)
    if len(series.annotations) > n:
        raise AnnotationException(
            "More annotations than rows",
            {'annotations': len(series.annotations), 'rows': n}
        )
    ann_start = [''] * n
    ann_end = [''] * n
    ann_label = [''] * n
    for k, ann in enumerate(series.annotations):
        ann_start[k], ann_end[k], ann_label[k] = str(ann.start), str(ann.end), ann.label

    frame = pd.DataFrame({
        'index': np.arange(n),
        'value': [repr(float(v)) for v in series.samples],
        'ann_start': ann_start,
        'ann_end': ann_end,
        'ann_label': ann_label,
    })
    frame.to_csv(path, index=False, lineterminator='\n', encoding='utf-8')

    with open(sidecar_path(path), 'w', encoding='utf-8') as f:
        json.dump({'sample_rate': series.sample_rate}, f)
        f.write('\n')

    return path


# ============================================================================
# Synthesis
# ============================================================================

def _rng(*keys: int) -> np.random.Generator:
    """Independent generator for a tuple of integer keys (negative seeds folded)."""
    return np.random.default_rng([int(k) & 0xFFFFFFFFFFFFFFFF for k in keys])


@dataclass(frozen=True)
class SynthesisParams:
    """Parameters of the synthetic ECG generator."""
    heart_rate_bpm: float = 60.0
    wavelet_order: int = 4
    noise_mu: float = 0.0
    noise_sigma: float = 0.0
    duration_samples: int = 3600
    sample_rate: float = 360.0
    seed: int = 0

    @property
    def period_samples(self) -> int:
        """Beat period in samples: round(60 * sample_rate / heart_rate_bpm)."""
        return int(round(60.0 * self.sample_rate / self.heart_rate_bpm))

    def validate(self) -> None:
        if not MIN_HEART_RATE_BPM <= self.heart_rate_bpm <= MAX_HEART_RATE_BPM:
            raise SynthesisException(
                f"heart_rate_bpm must lie in [{MIN_HEART_RATE_BPM:g}, {MAX_HEART_RATE_BPM:g}]",
                {'heart_rate_bpm': self.heart_rate_bpm}
            )
        if self.wavelet_order < 2:
            raise SynthesisException(
                "wavelet_order must be >= 2",
                {'wavelet_order': self.wavelet_order}
            )
        if self.noise_sigma < 0:
            raise SynthesisException("noise_sigma must be >= 0", {'noise_sigma': self.noise_sigma})
        if self.sample_rate <= 0:
            raise SynthesisException("sample_rate must be positive", {'sample_rate': self.sample_rate})
        if self.duration_samples <= 0:
            raise SynthesisException(
                "duration_samples must be positive",
                {'duration_samples': self.duration_samples}
            )


@dataclass(frozen=True)
class WaveAtom:
    """One wave of the beat; center and width are fractions of the beat period."""
    name: str
    center: float
    width: float
    amplitude: float


NORMAL_BEAT: Tuple[WaveAtom, ...] = (
    WaveAtom('P', center=0.20, width=0.10, amplitude=0.15),
    WaveAtom('Q', center=0.36, width=0.03, amplitude=-0.12),
    WaveAtom('R', center=0.40, width=0.035, amplitude=1.00),
    WaveAtom('S', center=0.44, width=0.03, amplitude=-0.25),
    WaveAtom('T', center=0.66, width=0.16, amplitude=0.30),
)


@lru_cache(maxsize=32)
def _scaling_function(order: int) -> Tuple[np.ndarray, np.ndarray, float]:
    """Daubechies scaling function on its support, unit peak; returns (x, phi, x_peak)."""
    phi, _psi, x = pywt.Wavelet(f"db{order}").wavefun(level=10)
    phi = np.asarray(phi, dtype=float)
    phi = phi / phi.max()
    x = np.asarray(x, dtype=float)
    x.setflags(write=False)
    phi.setflags(write=False)
    return x, phi, float(x[int(np.argmax(phi))])


def beat_template(
    period_samples: int,
    atoms: Sequence[WaveAtom] = NORMAL_BEAT,
    wavelet_order: int = 4
) -> np.ndarray:
    """
    One P-QRS-T complex of ``period_samples`` samples.

    Each atom is the ``db<wavelet_order>`` scaling function stretched so
    that its support spans ``width * period`` samples, shifted so that its
    peak sits at ``center * period``, and scaled to ``amplitude``.
    """
    if period_samples < 1:
        raise SynthesisException("Beat period must be at least one sample", {'period': period_samples})
    x, phi, x_peak = _scaling_function(wavelet_order)
    support = x[-1] - x[0]
    u = np.arange(period_samples, dtype=float)

    beat = np.zeros(period_samples)
    for atom in atoms:
        if atom.amplitude == 0.0 or atom.width <= 0.0:
            continue
        span = max(atom.width * period_samples, 1.0)
        xq = x_peak + (u - atom.center * period_samples) * (support / span)
        beat += atom.amplitude * np.interp(xq, x, phi, left=0.0, right=0.0)
    return beat


def synthesize_normal(params: SynthesisParams) -> AnnotatedSeries:
    """
    Normal sinus rhythm: the beat template tiled at the beat period plus
    Gaussian noise ``N(noise_mu, noise_sigma)``.

    Raises:
        SynthesisException: heart rate outside [40, 220] bpm or duration
            shorter than one beat period
    """
    params.validate()
    period = params.period_samples
    if params.duration_samples < period:
        raise SynthesisException(
            "duration_samples is shorter than one beat period",
            {'duration_samples': params.duration_samples, 'period': period}
        )

    beat = beat_template(period, NORMAL_BEAT, params.wavelet_order)
    clean = np.tile(beat, math.ceil(params.duration_samples / period))[:params.duration_samples]
    noise = _rng(params.seed).normal(params.noise_mu, params.noise_sigma, params.duration_samples)

    return AnnotatedSeries(
        samples=clean + noise,
        sample_rate=params.sample_rate,
        annotations=[],
        name=f"normal_{params.seed}",
    )


class ArrhythmiaKind(str, Enum):
    """Rhythm anomalies the generator can inject."""
    ATRIAL_FLUTTER = 'atrial_flutter'
    ATRIAL_FIBRILLATION = 'atrial_fibrillation'
    SUPRAVENTRICULAR_TACHYCARDIA = 'supraventricular_tachycardia'
    PREMATURE_ATRIAL_CONTRACTION = 'premature_atrial_contraction'
    VENTRICULAR_RHYTHM = 'ventricular_rhythm'
    RANDOM_ANOMALY = 'random_anomaly'


@dataclass(frozen=True)
class ArrhythmiaPreset:
    """
    Distortion of the normal beat that characterises one arrhythmia kind.

    The local rate is ``max(host_rate * rate_multiplier, min_rate_bpm)``.
    ``rr_pattern`` multiplies successive RR intervals cyclically and
    ``rr_jitter`` adds relative Gaussian jitter on top. A non-zero
    ``baseline_wave_amp`` adds atrial activity at ``baseline_wave_bpm``.
    """
    rate_multiplier: float = 1.0
    min_rate_bpm: float = 0.0
    p_wave_scale: float = 1.0
    qrs_width_scale: float = 1.0
    t_wave_scale: float = 1.0
    amplitude_scale: float = 1.0
    rr_jitter: float = 0.0
    rr_pattern: Tuple[float, ...] = (1.0,)
    baseline_wave_bpm: float = 0.0
    baseline_wave_amp: float = 0.0
    baseline_wave_shape: str = 'sawtooth'
    random_resample: bool = False


ARRHYTHMIA_PRESETS: Dict[ArrhythmiaKind, ArrhythmiaPreset] = {
    # saw-tooth F waves at ~300/min, 2:1 conduction, no distinct P wave
    ArrhythmiaKind.ATRIAL_FLUTTER: ArrhythmiaPreset(
        rate_multiplier=1.5, p_wave_scale=0.0,
        baseline_wave_bpm=300.0, baseline_wave_amp=0.12, baseline_wave_shape='sawtooth',
    ),
    # no P wave, irregularly irregular RR, fibrillatory baseline
    ArrhythmiaKind.ATRIAL_FIBRILLATION: ArrhythmiaPreset(
        rate_multiplier=1.4, p_wave_scale=0.0, rr_jitter=0.25,
        baseline_wave_bpm=420.0, baseline_wave_amp=0.05, baseline_wave_shape='fibrillatory',
    ),
    # narrow-complex rate above 150 bpm, P buried in the preceding T
    ArrhythmiaKind.SUPRAVENTRICULAR_TACHYCARDIA: ArrhythmiaPreset(
        rate_multiplier=2.5, min_rate_bpm=160.0, p_wave_scale=0.3,
    ),
    # early beat with an abnormal P wave, followed by a compensatory pause
    ArrhythmiaKind.PREMATURE_ATRIAL_CONTRACTION: ArrhythmiaPreset(
        p_wave_scale=0.5, rr_pattern=(1.0, 0.6, 1.4),
    ),
    # wide bizarre QRS, no P wave, discordant T wave
    ArrhythmiaKind.VENTRICULAR_RHYTHM: ArrhythmiaPreset(
        rate_multiplier=1.2, p_wave_scale=0.0, qrs_width_scale=2.5,
        t_wave_scale=-1.2, amplitude_scale=1.4,
    ),
    # beat period and amplitude resampled uniformly within +-50%
    ArrhythmiaKind.RANDOM_ANOMALY: ArrhythmiaPreset(random_resample=True),
}


@dataclass(frozen=True)
class ArrhythmiaSpec:
    """Which arrhythmia to inject and where: ``[start_index, start_index + length_samples)``."""
    kind: ArrhythmiaKind
    start_index: int
    length_samples: int

    def __post_init__(self):
        object.__setattr__(self, 'kind', ArrhythmiaKind(self.kind))
        if self.length_samples <= 0:
            raise SynthesisException(
                "length_samples must be positive",
                {'length_samples': self.length_samples}
            )

    @property
    def end_index(self) -> int:
        return self.start_index + self.length_samples


def _morph_atoms(preset: ArrhythmiaPreset) -> Tuple[WaveAtom, ...]:
    morphed = []
    for atom in NORMAL_BEAT:
        if atom.name == 'P':
            atom = replace(atom, amplitude=atom.amplitude * preset.p_wave_scale)
        elif atom.name in ('Q', 'R', 'S'):
            r_center = 0.40
            atom = replace(
                atom,
                center=r_center + (atom.center - r_center) * preset.qrs_width_scale,
                width=atom.width * preset.qrs_width_scale,
            )
        elif atom.name == 'T':
            atom = replace(atom, amplitude=atom.amplitude * preset.t_wave_scale)
        morphed.append(atom)
    return tuple(morphed)


def _baseline_wave(
    preset: ArrhythmiaPreset,
    length: int,
    sample_rate: float,
    rng: np.random.Generator
) -> np.ndarray:
    if preset.baseline_wave_amp == 0.0:
        return np.zeros(length)
    t = np.arange(length) / sample_rate
    freq = preset.baseline_wave_bpm / 60.0
    phase = rng.uniform(0.0, 2 * np.pi)
    if preset.baseline_wave_shape == 'sawtooth':
        return preset.baseline_wave_amp * scipy_signal.sawtooth(2 * np.pi * freq * t + phase, width=0.8)
    # fibrillatory: frequency wanders slowly around the nominal rate
    drift = np.cumsum(rng.normal(0.0, 0.02, length))
    inst_freq = freq * (1.0 + 0.15 * np.tanh(drift))
    return preset.baseline_wave_amp * np.sin(2 * np.pi * np.cumsum(inst_freq) / sample_rate + phase)


def arrhythmia_waveform(
    kind: ArrhythmiaKind,
    length_samples: int,
    params: SynthesisParams,
    rng: np.random.Generator
) -> np.ndarray:
    """Noisy waveform of ``length_samples`` samples for one arrhythmia kind."""
    preset = ARRHYTHMIA_PRESETS[ArrhythmiaKind(kind)]
    rate = max(params.heart_rate_bpm * preset.rate_multiplier, preset.min_rate_bpm)
    base_period = max(int(round(60.0 * params.sample_rate / rate)), 8)
    atoms = _morph_atoms(preset)

    beats: List[np.ndarray] = []
    total = 0
    k = 0
    while total < length_samples:
        amplitude = preset.amplitude_scale
        if preset.random_resample:
            period = base_period * rng.uniform(0.5, 1.5)
            amplitude *= rng.uniform(0.5, 1.5)
        else:
            period = base_period * preset.rr_pattern[k % len(preset.rr_pattern)]
            if preset.rr_jitter > 0:
                period *= float(np.clip(1.0 + preset.rr_jitter * rng.normal(), 0.4, 1.8))
        period_i = max(int(round(period)), 8)
        beats.append(amplitude * beat_template(period_i, atoms, params.wavelet_order))
        total += period_i
        k += 1

    waveform = np.concatenate(beats)[:length_samples]
    waveform = waveform + _baseline_wave(preset, length_samples, params.sample_rate, rng)
    return waveform + rng.normal(params.noise_mu, params.noise_sigma, length_samples)


def inject_arrhythmia(
    series: AnnotatedSeries,
    spec: ArrhythmiaSpec,
    params: SynthesisParams
) -> AnnotatedSeries:
    """
    Replace ``[spec.start_index, spec.end_index)`` with the kind-specific
    waveform and append the matching annotation.

    Samples outside the interval are left untouched.

    Raises:
        AnnotationException: interval out of bounds or overlapping an
            existing annotation
    """
    params.validate()
    start, end = spec.start_index, spec.end_index
    if start < 0 or end > len(series):
        raise AnnotationException(
            "Arrhythmia interval out of bounds",
            {'start': start, 'end': end, 'length': len(series)}
        )
    for ann in series.annotations:
        if start < ann.end and ann.start < end:
            raise AnnotationException(
                "Arrhythmia interval overlaps an existing annotation",
                {'interval': (start, end), 'existing': tuple(ann)}
            )

    kind_index = list(ArrhythmiaKind).index(spec.kind)
    rng = _rng(params.seed, start, kind_index)
    samples = series.samples.copy()
    samples[start:end] = arrhythmia_waveform(spec.kind, spec.length_samples, params, rng)

    logger.debug(
        f"Injected {spec.kind.value} at [{start}, {end})",
        extra={'extra_fields': {'series': series.name, 'kind': spec.kind.value}}
    )
    return series.replace_samples(
        samples,
        list(series.annotations) + [Annotation(start, end, spec.kind.value)],
    )


def synthesize_plain_periodic(
    freq_hz: float,
    duration_samples: int,
    sample_rate: float,
    noise_sigma: float = 0.0,
    seed: int = 0
) -> AnnotatedSeries:
    """
    Sine wave ``sin(2*pi*freq*n/rate)`` plus ``N(0, noise_sigma)``.

    Raises:
        SynthesisException: freq_hz not in (0, sample_rate / 2), negative
            noise, or non-positive duration
    """
    if not 0 < freq_hz < sample_rate / 2:
        raise SynthesisException(
            "freq_hz must lie in (0, sample_rate / 2)",
            {'freq_hz': freq_hz, 'sample_rate': sample_rate}
        )
    if noise_sigma < 0:
        raise SynthesisException("noise_sigma must be >= 0", {'noise_sigma': noise_sigma})
    if duration_samples <= 0:
        raise SynthesisException("duration_samples must be positive", {'duration_samples': duration_samples})

    t = np.arange(duration_samples) / sample_rate
    samples = np.sin(2 * np.pi * freq_hz * t)
    samples = samples + _rng(seed).normal(0.0, noise_sigma, duration_samples)
    return AnnotatedSeries(
        samples=samples,
        sample_rate=sample_rate,
        annotations=[],
        name=f"sine_{seed}",
    )
