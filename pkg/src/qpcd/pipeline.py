"""
Detection Pipeline
==================

Runs one series through signal -> embed -> PCA -> Wasserstein series ->
bootstrap -> labels, timing each stage and wrapping any stage failure in
``StageException`` so callers can report ``stage: cause``.

Usage:
    from qpcd.config import Config
    from qpcd.pipeline import PipelineConfig, run_detection

    pcfg = PipelineConfig.from_config(Config.load('config/default.yaml'))
    report = run_detection(series, pcfg)
    print(report.change_detected, report.flagged)
"""

import logging
from contextlib import contextmanager
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, Iterator, List, Optional, Tuple

from .bootstrap import (
    BootstrapConfig,
    BootstrapDiagnostics,
    BootstrapSample,
    bootstrap_statistic,
    default_block_len,
    label_intervals,
)
from .config import Config
from .corpus import CorpusSettings
from .detector import (
    ChangeStatistic,
    DetectorConfig,
    WassersteinSeries,
    change_statistic,
    default_half_window,
    points_per_loop,
    wasserstein_series,
)
from .embedding import EmbedParams, PointCloud, pca_fit, pca_project, sliding_window_embed
from .exceptions import ConfigurationException, QpcdException, SignalException, StageException
from .logging_config import PerformanceLogger
from .parallel import resolve_threads
from .signal import AnnotatedSeries, SynthesisParams
from .transport import OtConfig

logger = logging.getLogger(__name__)

STAGES = ('signal', 'embed', 'pca', 'series', 'bootstrap', 'label')


@dataclass(frozen=True)
class PipelineConfig:
    """Typed, validated view of a ``Config``."""
    embed: EmbedParams
    pca_dim: int
    detector: DetectorConfig
    bootstrap: BootstrapConfig
    synthesis: SynthesisParams
    corpus: CorpusSettings
    loops_per_half: int = 2
    period_samples: int = 450
    threads: int = 1
    seed: int = 0

    @classmethod
    def from_config(cls, config: Config) -> 'PipelineConfig':
        """
        Build and validate every sub-config.

        ``detector.period_samples``, ``detector.h`` and
        ``bootstrap.block_len`` fall back to ``M*s``, two loops of the
        curve and a sixteenth of a loop respectively.

        Raises:
            ConfigurationException: any section is invalid
        """
        config.validate()
        try:
            embed = EmbedParams(
                M=int(config.get('embed.M')),
                s=int(config.get('embed.s')),
                dt=int(config.get('embed.dt')),
            )
            embed.validate()

            period = config.get('detector.period_samples') or embed.window_span
            loops = int(config.get('detector.loops_per_half'))
            if loops < 1:
                raise ConfigurationException(
                    "detector.loops_per_half must be >= 1",
                    {'key': 'detector.loops_per_half', 'value': loops}
                )
            h = config.get('detector.h') or default_half_window(int(period), embed.dt, loops)

            ot_cfg = OtConfig(
                p=float(config.get('ot.p')),
                epsilon=config.get('ot.epsilon'),
                epsilon_scale=float(config.get('ot.epsilon_scale')),
                max_iter=int(config.get('ot.max_iter')),
                tol=float(config.get('ot.tol')),
            )
            detector = DetectorConfig(
                h=int(h),
                stride=int(config.get('detector.stride')),
                ot=ot_cfg,
                use_exact=config.get('detector.use_exact'),
            )
            detector.validate()

            bootstrap = BootstrapConfig(
                replications=int(config.get('bootstrap.replications')),
                block_len=int(
                    config.get('bootstrap.block_len')
                    or default_block_len(points_per_loop(int(period), embed.dt))
                ),
                alpha=float(config.get('bootstrap.alpha')),
                seed=int(config.get('seed')),
                weight_scheme=config.get('bootstrap.weight_scheme'),
                shuffle_blocks=bool(config.get('bootstrap.shuffle_blocks')),
                max_redraws=int(config.get('bootstrap.max_redraws')),
            )
            bootstrap.validate()

            synthesis = SynthesisParams(
                heart_rate_bpm=float(config.get('signal.heart_rate_bpm')),
                wavelet_order=int(config.get('signal.wavelet_order')),
                noise_mu=float(config.get('signal.noise_mu')),
                noise_sigma=float(config.get('signal.noise_sigma')),
                sample_rate=float(config.get('signal.sample_rate')),
                seed=int(config.get('seed')),
            )
            synthesis.validate()

            corpus = CorpusSettings(
                count=int(config.get('corpus.count')),
                beats=int(config.get('corpus.beats')),
                arrhythmia_beats_min=int(config.get('corpus.arrhythmia_beats_min')),
                arrhythmia_beats_max=int(config.get('corpus.arrhythmia_beats_max')),
                mix=dict(config.get('corpus.mix')),
            )
            corpus.validate()

            pca_dim = int(config.get('pca.dim'))
            if not 1 <= pca_dim <= embed.M + 1:
                raise ConfigurationException(
                    "pca.dim must lie in [1, M + 1]",
                    {'key': 'pca.dim', 'value': pca_dim}
                )
        except ConfigurationException:
            raise
        except QpcdException as e:
            raise ConfigurationException(e.message, e.details)
        except (TypeError, ValueError) as e:
            raise ConfigurationException("Invalid configuration value", {'error': str(e)})

        return cls(
            embed=embed,
            pca_dim=pca_dim,
            detector=detector,
            bootstrap=bootstrap,
            synthesis=synthesis,
            corpus=corpus,
            loops_per_half=loops,
            period_samples=int(period),
            threads=resolve_threads(int(config.get('runtime.threads'))),
            seed=int(config.get('seed')),
        )

    def to_dict(self) -> Dict[str, Any]:
        """Resolved parameters echoed into every report."""
        return {
            'embed': {'M': self.embed.M, 's': self.embed.s, 'dt': self.embed.dt},
            'pca_dim': self.pca_dim,
            'detector': {
                'h': self.detector.h,
                'stride': self.detector.stride,
                'exact': self.detector.exact,
                'loops_per_half': self.loops_per_half,
                'period_samples': self.period_samples,
            },
            'ot': asdict(self.detector.ot),
            'bootstrap': {
                'replications': self.bootstrap.replications,
                'block_len': self.bootstrap.block_len,
                'alpha': self.bootstrap.alpha,
                'weight_scheme': self.bootstrap.weight_scheme.value,
                'shuffle_blocks': self.bootstrap.shuffle_blocks,
                'max_redraws': self.bootstrap.max_redraws,
            },
            'seed': self.seed,
        }


@dataclass(frozen=True, eq=False)
class DetectionReport:
    """Everything ``cmd_detect`` writes for one series."""
    name: str
    threshold: float
    statistic: ChangeStatistic
    change_detected: bool
    flagged: List[Tuple[int, int]]
    series: WassersteinSeries
    cloud: PointCloud
    bootstrap: BootstrapSample
    config: Dict[str, Any]
    n_samples: int = 0
    sample_rate: float = 0.0
    timings: Dict[str, float] = field(default_factory=dict)

    @property
    def diagnostics(self) -> Dict[str, Any]:
        boot: BootstrapDiagnostics = self.bootstrap.diagnostics
        return {
            'solver': 'exact' if self.config['detector']['exact'] else 'sinkhorn',
            'series_non_converged': self.series.non_converged,
            'bootstrap_non_converged': boot.non_converged,
            'bootstrap_redraws': boot.redraws,
        }

    def to_dict(self, include_timings: bool = True) -> Dict[str, Any]:
        data = {
            'name': self.name,
            'n_samples': self.n_samples,
            'sample_rate': self.sample_rate,
            'n_points': len(self.cloud),
            'n_windows': len(self.series),
            'threshold': self.threshold,
            'statistic': {
                'value': self.statistic.value,
                'argmax_tau': self.statistic.argmax_tau,
            },
            'change_detected': self.change_detected,
            'flagged': [[start, end] for start, end in self.flagged],
            'window_span': self.series.window_span,
            'bootstrap_statistics': [float(v) for v in self.bootstrap.statistics],
            'diagnostics': self.diagnostics,
            'config': self.config,
        }
        if include_timings:
            data['timings'] = dict(self.timings)
        return data

    def canonical(self) -> Dict[str, Any]:
        """Report without timings; identical for identical input and config."""
        return self.to_dict(include_timings=False)


@contextmanager
def _stage(name: str, timings: Dict[str, float], **context) -> Iterator[None]:
    with PerformanceLogger(logger, name, **context) as perf:
        try:
            yield
        except QpcdException as e:
            raise StageException(name, e) from e
    timings[name] = perf.duration


def run_detection(
    series: AnnotatedSeries,
    config: PipelineConfig,
    n_jobs: Optional[int] = None
) -> DetectionReport:
    """
    Full detection pipeline for one series.

    Raises:
        StageException: any stage failed; ``.stage`` names it
    """
    n_jobs = config.threads if n_jobs is None else n_jobs
    timings: Dict[str, float] = {}

    with _stage('signal', timings, series=series.name):
        if len(series) < config.embed.window_span + 1:
            raise SignalException(
                "Series shorter than the embedding window",
                {'samples': len(series), 'required': config.embed.window_span + 1}
            )

    with _stage('embed', timings, series=series.name):
        raw_cloud = sliding_window_embed(series, config.embed)

    with _stage('pca', timings, series=series.name):
        model = pca_fit(raw_cloud, config.pca_dim)
        cloud = pca_project(model, raw_cloud)

    with _stage('series', timings, series=series.name):
        wseries = wasserstein_series(cloud, config.detector, n_jobs=n_jobs)
        statistic = change_statistic(wseries)

    with _stage('bootstrap', timings, series=series.name):
        sample = bootstrap_statistic(cloud, config.detector, config.bootstrap, n_jobs=n_jobs)

    with _stage('label', timings, series=series.name):
        flagged, detected = label_intervals(wseries, sample.threshold)

    logger.info(
        f"{series.name}: T={statistic.value:.6g}, threshold={sample.threshold:.6g}, "
        f"change_detected={detected}",
        extra={'extra_fields': {'flagged': len(flagged), 'argmax_tau': statistic.argmax_tau}}
    )
    return DetectionReport(
        name=series.name,
        threshold=sample.threshold,
        statistic=statistic,
        change_detected=detected,
        flagged=flagged,
        series=wseries,
        cloud=cloud,
        bootstrap=sample,
        config=config.to_dict(),
        n_samples=len(series),
        sample_rate=series.sample_rate,
        timings=timings,
    )
