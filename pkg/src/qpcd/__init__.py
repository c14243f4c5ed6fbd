"""Change point detection in quasi-periodic signals.

A series is delay-embedded into a point cloud, projected onto its top
principal components, and scanned with a window whose two halves are
compared by the Wasserstein distance. A weighted moving-block bootstrap
supplies the detection threshold.

Example:
    from qpcd import Config, PipelineConfig, load_csv, run_detection

    config = PipelineConfig.from_config(Config.load('config/default.yaml'))
    report = run_detection(load_csv('recording.csv'), config)
    print(report.change_detected, report.flagged)
"""

__version__ = "0.1.0"

from .bootstrap import BootstrapConfig, DetectionResult, WeightScheme, detect
from .config import Config
from .corpus import generate_corpus
from .detector import DetectorConfig, WassersteinSeries, change_statistic, wasserstein_series
from .embedding import EmbedParams, PointCloud, pca_fit, pca_project, sliding_window_embed
from .evaluation import EvalReport, aggregate, format_table, score_series
from .exceptions import QpcdException, StageException
from .pipeline import DetectionReport, PipelineConfig, run_detection
from .signal import (
    AnnotatedSeries,
    Annotation,
    ArrhythmiaKind,
    ArrhythmiaSpec,
    SynthesisParams,
    inject_arrhythmia,
    load_csv,
    save_csv,
    synthesize_normal,
    synthesize_plain_periodic,
)
from .transport import EmpiricalMeasure, OtConfig, wasserstein_exact, wasserstein_sinkhorn

__all__ = [
    '__version__',
    'AnnotatedSeries',
    'Annotation',
    'ArrhythmiaKind',
    'ArrhythmiaSpec',
    'BootstrapConfig',
    'Config',
    'DetectionReport',
    'DetectionResult',
    'DetectorConfig',
    'EmbedParams',
    'EmpiricalMeasure',
    'EvalReport',
    'OtConfig',
    'PipelineConfig',
    'PointCloud',
    'QpcdException',
    'StageException',
    'SynthesisParams',
    'WassersteinSeries',
    'WeightScheme',
    'aggregate',
    'change_statistic',
    'detect',
    'format_table',
    'generate_corpus',
    'inject_arrhythmia',
    'load_csv',
    'pca_fit',
    'pca_project',
    'run_detection',
    'save_csv',
    'score_series',
    'sliding_window_embed',
    'synthesize_normal',
    'synthesize_plain_periodic',
    'wasserstein_exact',
    'wasserstein_series',
    'wasserstein_sinkhorn',
]
