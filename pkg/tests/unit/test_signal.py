"""
Unit tests for the signal module.

Tests cover:
- CSV ingestion and its row diagnostics
- Synthetic normal rhythm (period, determinism, noise)
- Arrhythmia injection (locality, annotations, rate change)
- Plain periodic fixtures
"""

import json

import numpy as np
import pytest
from scipy.signal import find_peaks

from qpcd.exceptions import (
    AnnotationException,
    CsvFormatException,
    SignalException,
    SynthesisException,
)
from qpcd.signal import (
    AnnotatedSeries,
    Annotation,
    ArrhythmiaKind,
    ArrhythmiaSpec,
    CsvFormat,
    SynthesisParams,
    beat_template,
    inject_arrhythmia,
    load_csv,
    save_csv,
    synthesize_normal,
    synthesize_plain_periodic,
)


@pytest.mark.unit
class TestAnnotatedSeries:
    """Test suite for the series data model."""

    def test_samples_are_read_only(self):
        """Stored samples cannot be modified in place."""
        series = AnnotatedSeries(samples=[0.0, 1.0], sample_rate=10.0)
        with pytest.raises(ValueError):
            series.samples[0] = 5.0

    def test_empty_series_rejected(self):
        with pytest.raises(SignalException):
            AnnotatedSeries(samples=[], sample_rate=10.0)

    def test_annotation_out_of_bounds(self):
        with pytest.raises(AnnotationException):
            AnnotatedSeries(samples=np.zeros(10), sample_rate=1.0, annotations=[(5, 11, 'x')])

    def test_overlapping_annotations_rejected(self):
        with pytest.raises(AnnotationException):
            AnnotatedSeries(
                samples=np.zeros(10),
                sample_rate=1.0,
                annotations=[(0, 5, 'a'), (4, 8, 'b')],
            )

    def test_touching_annotations_allowed(self):
        """Half-open intervals sharing an endpoint do not overlap."""
        series = AnnotatedSeries(
            samples=np.zeros(10),
            sample_rate=1.0,
            annotations=[(0, 5, 'a'), (5, 8, 'b')],
        )
        assert series.annotations == [Annotation(0, 5, 'a'), Annotation(5, 8, 'b')]


@pytest.mark.unit
class TestLoadCsv:
    """Test suite for CSV ingestion."""

    def test_minimal_values_only(self, temp_dir):
        """A bare column of numbers parses with the supplied rate."""
        path = temp_dir / 'minimal.csv'
        path.write_text("0.0\n1.0\n0.0\n")

        series = load_csv(path, CsvFormat(sample_rate=360.0))

        assert series.samples.tolist() == [0.0, 1.0, 0.0]
        assert series.annotations == []
        assert series.sample_rate == 360.0
        assert series.name == 'minimal'

    def test_annotation_row(self, temp_dir):
        """Annotation cells map directly to a half-open interval."""
        rows = ["index,value,ann_start,ann_end,ann_label", "0,0.5,100,200,AFIB"]
        rows += [f"{i},0.5,,," for i in range(1, 300)]
        path = temp_dir / 'annotated.csv'
        path.write_text("\n".join(rows) + "\n")

        series = load_csv(path, CsvFormat(sample_rate=360.0))

        assert len(series) == 300
        assert series.annotations == [Annotation(100, 200, 'AFIB')]

    def test_reversed_interval_reports_row(self, temp_dir):
        path = temp_dir / 'reversed.csv'
        rows = ["index,value,ann_start,ann_end,ann_label"]
        rows += [f"{i},0.0,,," for i in range(3)]
        rows.append("3,0.0,500,400,X")
        path.write_text("\n".join(rows) + "\n")

        with pytest.raises(AnnotationException) as exc_info:
            load_csv(path, CsvFormat(sample_rate=360.0))

        assert "interval end before start at row 5" in str(exc_info.value)

    def test_non_numeric_value_reports_row(self, temp_dir):
        """Row numbers are 1-based file lines, the header being line 1."""
        path = temp_dir / 'bad.csv'
        path.write_text("value\n1.0\nabc\n2.0\n")

        with pytest.raises(CsvFormatException) as exc_info:
            load_csv(path, CsvFormat(sample_rate=100.0))

        assert exc_info.value.row == 3
        assert "row 3" in str(exc_info.value)

    def test_missing_file(self, temp_dir):
        with pytest.raises(SignalException):
            load_csv(temp_dir / 'absent.csv', CsvFormat(sample_rate=1.0))

    def test_sample_rate_from_sidecar(self, temp_dir):
        path = temp_dir / 'rated.csv'
        path.write_text("value\n1.0\n2.0\n")
        (temp_dir / 'rated.json').write_text(json.dumps({'sample_rate': 250.0}))

        assert load_csv(path).sample_rate == 250.0

    def test_missing_sample_rate(self, temp_dir):
        path = temp_dir / 'norate.csv'
        path.write_text("value\n1.0\n2.0\n")

        with pytest.raises(CsvFormatException):
            load_csv(path)

    def test_save_then_load_is_exact(self, temp_dir):
        """Values survive bitwise; annotations and rate are restored."""
        rng = np.random.default_rng(3)
        series = AnnotatedSeries(
            samples=rng.normal(size=500),
            sample_rate=360.0,
            annotations=[(10, 40, 'atrial_flutter'), (100, 180, 'ventricular_rhythm')],
            name='roundtrip',
        )
        path = save_csv(series, temp_dir / 'roundtrip.csv')

        loaded = load_csv(path)

        assert np.array_equal(loaded.samples, series.samples)
        assert loaded.annotations == series.annotations
        assert loaded.sample_rate == 360.0


@pytest.mark.unit
class TestSynthesizeNormal:
    """Test suite for the normal rhythm generator."""

    def test_period_from_autocorrelation(self):
        """Noiseless 60 bpm at 360 Hz repeats every 360 samples."""
        params = SynthesisParams(heart_rate_bpm=60, sample_rate=360, duration_samples=3600)
        x = synthesize_normal(params).samples
        x = x - x.mean()

        lags = np.arange(200, 520)
        ac = np.array([np.dot(x[:-lag], x[lag:]) / (len(x) - lag) for lag in lags])

        assert abs(int(lags[np.argmax(ac)]) - 360) <= 1

    def test_deterministic(self):
        params = SynthesisParams(noise_sigma=0.1, seed=42)
        assert np.array_equal(synthesize_normal(params).samples, synthesize_normal(params).samples)

    def test_noise_is_centered(self):
        """Noisy minus noiseless output has mean within 3 sigma / sqrt(n) of zero."""
        noisy = synthesize_normal(SynthesisParams(noise_sigma=0.05, seed=3, duration_samples=7200))
        clean = synthesize_normal(SynthesisParams(noise_sigma=0.0, seed=3, duration_samples=7200))
        residual = noisy.samples - clean.samples

        assert abs(residual.mean()) <= 3 * 0.05 / np.sqrt(residual.size)

    def test_no_annotations(self):
        assert synthesize_normal(SynthesisParams()).annotations == []

    @pytest.mark.parametrize("rate", [39.0, 221.0])
    def test_heart_rate_range(self, rate):
        with pytest.raises(SynthesisException):
            synthesize_normal(SynthesisParams(heart_rate_bpm=rate))

    def test_duration_shorter_than_period(self):
        with pytest.raises(SynthesisException):
            synthesize_normal(SynthesisParams(heart_rate_bpm=60, duration_samples=100))

    def test_beat_template_peaks_at_r_wave(self):
        beat = beat_template(360)
        assert beat.shape == (360,)
        assert abs(int(np.argmax(beat)) - 144) <= 3


@pytest.mark.unit
class TestInjectArrhythmia:
    """Test suite for arrhythmia injection."""

    @pytest.fixture
    def host(self):
        params = SynthesisParams(heart_rate_bpm=60, duration_samples=12960, seed=5)
        return params, synthesize_normal(params)

    def test_zero_length_rejected(self):
        with pytest.raises(SynthesisException):
            ArrhythmiaSpec(ArrhythmiaKind.ATRIAL_FLUTTER, start_index=0, length_samples=0)

    def test_outside_samples_unchanged(self, host):
        params, series = host
        spec = ArrhythmiaSpec(ArrhythmiaKind.ATRIAL_FIBRILLATION, 3600, 1800)

        out = inject_arrhythmia(series, spec, params)

        assert np.array_equal(out.samples[:3600], series.samples[:3600])
        assert np.array_equal(out.samples[5400:], series.samples[5400:])
        assert not np.array_equal(out.samples[3600:5400], series.samples[3600:5400])

    def test_annotation_appended(self, host):
        params, series = host
        spec = ArrhythmiaSpec(ArrhythmiaKind.VENTRICULAR_RHYTHM, 720, 1080)

        out = inject_arrhythmia(series, spec, params)

        assert out.annotations == [Annotation(720, 1800, 'ventricular_rhythm')]
        assert series.annotations == []

    def test_tachycardia_doubles_beat_rate(self, host):
        """R-peak count inside the interval is at least twice the host's over the same span."""
        params, series = host
        spec = ArrhythmiaSpec(ArrhythmiaKind.SUPRAVENTRICULAR_TACHYCARDIA, 3600, 3600)

        out = inject_arrhythmia(series, spec, params)
        inside, _ = find_peaks(out.samples[3600:7200], height=0.5)
        outside, _ = find_peaks(out.samples[0:3600], height=0.5)

        assert len(inside) >= 2 * len(outside)

    @pytest.mark.parametrize("kind", list(ArrhythmiaKind))
    def test_every_kind_fills_interval(self, host, kind):
        params, series = host
        out = inject_arrhythmia(series, ArrhythmiaSpec(kind, 1000, 2000), params)

        assert len(out) == len(series)
        assert np.all(np.isfinite(out.samples))
        assert out.annotations[-1].label == kind.value

    def test_overlap_rejected(self, host):
        params, series = host
        first = inject_arrhythmia(series, ArrhythmiaSpec(ArrhythmiaKind.ATRIAL_FLUTTER, 1000, 1000), params)

        with pytest.raises(AnnotationException):
            inject_arrhythmia(first, ArrhythmiaSpec(ArrhythmiaKind.RANDOM_ANOMALY, 1500, 1000), params)

    def test_out_of_bounds_rejected(self, host):
        params, series = host
        with pytest.raises(AnnotationException):
            inject_arrhythmia(series, ArrhythmiaSpec(ArrhythmiaKind.ATRIAL_FLUTTER, 12000, 2000), params)

    def test_deterministic(self, host):
        params, series = host
        spec = ArrhythmiaSpec(ArrhythmiaKind.RANDOM_ANOMALY, 2000, 2000)
        assert np.array_equal(
            inject_arrhythmia(series, spec, params).samples,
            inject_arrhythmia(series, spec, params).samples,
        )


@pytest.mark.unit
class TestSynthesizePlainPeriodic:
    """Test suite for sine fixtures."""

    def test_known_values(self):
        series = synthesize_plain_periodic(1.0, 200, 100.0)
        assert series.samples[0] == 0.0
        assert series.samples[25] == pytest.approx(1.0, abs=1e-12)

    def test_exactly_periodic(self):
        series = synthesize_plain_periodic(1.0, 200, 100.0)
        assert np.allclose(series.samples[:100], series.samples[100:], atol=1e-12)

    def test_nyquist_guard(self):
        with pytest.raises(SynthesisException):
            synthesize_plain_periodic(100.0, 200, 100.0)

    def test_noise_seeded(self):
        a = synthesize_plain_periodic(1.0, 200, 100.0, noise_sigma=0.1, seed=9)
        b = synthesize_plain_periodic(1.0, 200, 100.0, noise_sigma=0.1, seed=9)
        assert np.array_equal(a.samples, b.samples)
